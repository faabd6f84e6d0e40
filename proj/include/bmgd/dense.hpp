#pragma once

#include <cstddef>
#include <vector>

#include "bmgd/error.hpp"

namespace bmgd::numerics {

using Vec = std::vector<double>;

// Row-major dense matrix. Sized for desk-scale work (p up to a few hundred,
// stacked systems up to a few thousand); no view/expression machinery.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// y = A x
Vec matvec(const DenseMatrix& a, const Vec& x);

// C = A B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);

// A += c * x * y^T  (rank-1 update; the moment-accumulation workhorse)
void rank1_update(DenseMatrix& a, double c, const double* x, const double* y);

Vec add(const Vec& x, const Vec& y);
Vec sub(const Vec& x, const Vec& y);
double dot(const Vec& x, const Vec& y);
double norm2(const Vec& x);
double max_abs_diff(const Vec& x, const Vec& y);
bool all_finite(const Vec& x);

}  // namespace bmgd::numerics
