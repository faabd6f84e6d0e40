#include "bmgd/dataset_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "bmgd/error.hpp"

namespace bmgd::datagen {

namespace {

constexpr std::uint64_t kHeaderBytes = 32;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
std::uint32_t get_u32(const unsigned char* b) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}
std::uint64_t get_u64(const unsigned char* b) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }
double get_f64(const unsigned char* b) { return std::bit_cast<double>(get_u64(b)); }

void write_doubles(std::ofstream& f, const double* v, std::uint64_t count) {
    // Serialize in chunks to keep the little-endian encoding explicit
    // without a syscall per value.
    std::string buf;
    constexpr std::uint64_t kChunk = 1 << 16;
    for (std::uint64_t done = 0; done < count;) {
        const std::uint64_t m = std::min(kChunk, count - done);
        buf.clear();
        buf.reserve(m * 8);
        for (std::uint64_t i = 0; i < m; ++i) put_f64(buf, v[done + i]);
        f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        done += m;
    }
}

void read_doubles(std::ifstream& f, double* v, std::uint64_t count, std::uint64_t base_offset,
                  const char* what) {
    std::vector<unsigned char> buf;
    constexpr std::uint64_t kChunk = 1 << 16;
    for (std::uint64_t done = 0; done < count;) {
        const std::uint64_t m = std::min(kChunk, count - done);
        buf.resize(m * 8);
        f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(m * 8));
        if (static_cast<std::uint64_t>(f.gcount()) != m * 8)
            throw FormatError(std::string("dataset file truncated while reading ") + what,
                              base_offset + done * 8 + static_cast<std::uint64_t>(std::max<std::streamsize>(f.gcount(), 0)));
        for (std::uint64_t i = 0; i < m; ++i) {
            v[done + i] = get_f64(buf.data() + i * 8);
            if (!std::isfinite(v[done + i]))
                throw FormatError(std::string("non-finite value in ") + what,
                                  base_offset + (done + i) * 8);
        }
        done += m;
    }
}

struct Header {
    std::uint64_t n;
    std::uint64_t p;
    ResponseKind kind;
};

Header read_header(std::ifstream& f, const std::string& path) {
    unsigned char h[kHeaderBytes];
    f.read(reinterpret_cast<char*>(h), kHeaderBytes);
    if (static_cast<std::uint64_t>(f.gcount()) != kHeaderBytes)
        throw FormatError("dataset file too short for header: " + path,
                          static_cast<std::uint64_t>(std::max<std::streamsize>(f.gcount(), 0)));
    if (std::memcmp(h, kMagic, 4) != 0) throw FormatError("bad magic in " + path, 0);
    const std::uint32_t version = get_u32(h + 4);
    if (version != kFormatVersion)
        throw FormatError("unsupported format version " + std::to_string(version) + " in " + path, 4);
    Header out{get_u64(h + 8), get_u64(h + 16), ResponseKind::linear};
    const unsigned kind_byte = h[24];
    if (kind_byte > 1) throw FormatError("unknown response kind in " + path, 24);
    out.kind = static_cast<ResponseKind>(kind_byte);
    for (int i = 25; i < 32; ++i)
        if (h[i] != 0) throw FormatError("reserved header bytes not zero in " + path,
                                         static_cast<std::uint64_t>(i));
    if (out.n == 0 || out.p == 0) throw FormatError("empty dataset dimensions in " + path, 8);
    return out;
}

}  // namespace

void write_dataset(const std::string& path, const Dataset& ds) {
    if (ds.x.size() != ds.n * ds.p || ds.y.size() != ds.n)
        throw InvalidArgumentError("write_dataset: dataset buffers disagree with n, p");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("write_dataset: cannot open " + path + " for writing");

    std::string header;
    header.append(kMagic, 4);
    put_u32(header, kFormatVersion);
    put_u64(header, ds.n);
    put_u64(header, ds.p);
    header.push_back(static_cast<char>(ds.kind));
    header.append(7, '\0');
    f.write(header.data(), static_cast<std::streamsize>(header.size()));

    write_doubles(f, ds.x.data(), ds.n * ds.p);
    write_doubles(f, ds.y.data(), ds.n);
    f.flush();
    if (!f) throw IoError("write_dataset: write failed for " + path);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_dataset: cannot open " + path);
    const Header h = read_header(f, path);

    Dataset ds;
    ds.n = h.n;
    ds.p = h.p;
    ds.kind = h.kind;
    ds.x.resize(h.n * h.p);
    ds.y.resize(h.n);
    read_doubles(f, ds.x.data(), h.n * h.p, kHeaderBytes, "design matrix");
    read_doubles(f, ds.y.data(), h.n, kHeaderBytes + h.n * h.p * 8, "response vector");

    // Anything after the payload means the file does not match its header.
    f.peek();
    if (!f.eof())
        throw FormatError("trailing bytes after payload in " + path,
                          kHeaderBytes + (h.n * h.p + h.n) * 8);
    return ds;
}

void write_truth_sidecar(const std::string& dataset_path, const GroundTruth& truth) {
    nlohmann::json j;
    j["theta"] = truth.theta;
    j["rho"] = truth.rho;
    j["noise_sd"] = truth.noise_sd;
    j["seed"] = truth.seed;
    j["kind"] = truth.kind == ResponseKind::linear ? "linear" : "binary";
    std::ofstream f(dataset_path + ".truth.json", std::ios::trunc);
    if (!f) throw IoError("cannot write truth sidecar for " + dataset_path);
    f << j.dump(2) << '\n';
}

GroundTruth read_truth_sidecar(const std::string& dataset_path) {
    std::ifstream f(dataset_path + ".truth.json");
    if (!f) throw IoError("cannot open truth sidecar for " + dataset_path);
    nlohmann::json j;
    try {
        f >> j;
        GroundTruth t;
        t.theta = j.at("theta").get<std::vector<double>>();
        t.rho = j.at("rho").get<double>();
        t.noise_sd = j.at("noise_sd").get<double>();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.kind = j.at("kind").get<std::string>() == "binary" ? ResponseKind::binary
                                                             : ResponseKind::linear;
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed truth sidecar for " + dataset_path + ": " + e.what());
    }
}

void MemorySource::load_rows(std::span<const std::uint32_t> rows, double* x_out,
                             double* y_out) const {
    const std::uint64_t p = ds_->p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::uint32_t r = rows[i];
        std::memcpy(x_out + i * p, ds_->x.data() + static_cast<std::uint64_t>(r) * p,
                    p * sizeof(double));
        y_out[i] = ds_->y[r];
    }
}

FileSource::FileSource(const std::string& path) : path_(path) {
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw IoError("FileSource: cannot open " + path);
        const Header h = read_header(probe, path);
        n_ = h.n;
        p_ = h.p;
        kind_ = h.kind;
    }
    file_ = std::fopen(path.c_str(), "rb");
    if (!file_) throw IoError("FileSource: cannot open " + path);
}

FileSource::~FileSource() {
    if (file_) std::fclose(file_);
}

void FileSource::load_rows(std::span<const std::uint32_t> rows, double* x_out,
                           double* y_out) const {
    std::vector<unsigned char> buf(p_ * 8);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::uint64_t r = rows[i];
        if (r >= n_) throw InvalidArgumentError("FileSource: row index out of range");
        const std::uint64_t xoff = kHeaderBytes + r * p_ * 8;
        if (std::fseek(file_, static_cast<long>(xoff), SEEK_SET) != 0 ||
            std::fread(buf.data(), 1, p_ * 8, file_) != p_ * 8)
            throw FormatError("dataset file truncated while gathering rows from " + path_, xoff);
        for (std::uint64_t j = 0; j < p_; ++j) {
            x_out[i * p_ + j] = get_f64(buf.data() + j * 8);
            if (!std::isfinite(x_out[i * p_ + j]))
                throw FormatError("non-finite design value in " + path_, xoff + j * 8);
        }
        const std::uint64_t yoff = kHeaderBytes + n_ * p_ * 8 + r * 8;
        unsigned char yb[8];
        if (std::fseek(file_, static_cast<long>(yoff), SEEK_SET) != 0 ||
            std::fread(yb, 1, 8, file_) != 8)
            throw FormatError("dataset file truncated while gathering responses from " + path_,
                              yoff);
        y_out[i] = get_f64(yb);
        if (!std::isfinite(y_out[i])) throw FormatError("non-finite response in " + path_, yoff);
    }
}

}  // namespace bmgd::datagen
