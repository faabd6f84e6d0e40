#include "bmgd/dense.hpp"

#include <algorithm>
#include <cmath>

#include "bmgd/kernels.hpp"

namespace bmgd::numerics {

bool DenseMatrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Vec matvec(const DenseMatrix& a, const Vec& x) {
    if (a.cols() != x.size())
        throw InvalidArgumentError("matvec: matrix is " + std::to_string(a.rows()) + "x" +
                                   std::to_string(a.cols()) + " but vector has length " +
                                   std::to_string(x.size()));
    Vec y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        y[i] = kernels::dot(a.row(i), x.data(), a.cols());
    return y;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows())
        throw InvalidArgumentError("matmul: inner dimensions disagree (" +
                                   std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                   ")");
    DenseMatrix c(a.rows(), b.cols());
    // i-k-j order: the inner update is an axpy over contiguous rows of B,
    // which keeps the kernel lanes busy without any blocking machinery.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik != 0.0) kernels::axpy(aik, b.row(k), ci, b.cols());
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

void rank1_update(DenseMatrix& a, double c, const double* x, const double* y) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double cxi = c * x[i];
        if (cxi != 0.0) kernels::axpy(cxi, y, a.row(i), a.cols());
    }
}

Vec add(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw InvalidArgumentError("add: length mismatch");
    Vec z(x);
    kernels::axpy(1.0, y.data(), z.data(), z.size());
    return z;
}

Vec sub(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw InvalidArgumentError("sub: length mismatch");
    Vec z(x);
    kernels::axpy(-1.0, y.data(), z.data(), z.size());
    return z;
}

double dot(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw InvalidArgumentError("dot: length mismatch");
    return kernels::dot(x.data(), y.data(), x.size());
}

double norm2(const Vec& x) { return std::sqrt(kernels::dot(x.data(), x.data(), x.size())); }

double max_abs_diff(const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw InvalidArgumentError("max_abs_diff: length mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

bool all_finite(const Vec& x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace bmgd::numerics
