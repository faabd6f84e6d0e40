#pragma once

#include <cstdio>
#include <memory>
#include <span>
#include <string>

#include "bmgd/dataset.hpp"

// On-disk dataset container. Fixed 32-byte header, little-endian:
//
//   bytes 0..3   magic "BMGD"
//   bytes 4..7   u32 format version (currently 1)
//   bytes 8..15  u64 n (rows)
//   bytes 16..23 u64 p (columns)
//   byte  24     u8 response kind (0 = linear, 1 = binary)
//   bytes 25..31 reserved, must be zero
//
// followed by n*p IEEE-754 doubles (X, row-major) and n doubles (y).
// Readers reject bad magic/version/kind, truncation, trailing bytes, and
// non-finite payload values, reporting the byte offset of the problem.

namespace bmgd::datagen {

inline constexpr char kMagic[4] = {'B', 'M', 'G', 'D'};
inline constexpr std::uint32_t kFormatVersion = 1;

void write_dataset(const std::string& path, const Dataset& ds);
Dataset read_dataset(const std::string& path);

// Ground-truth sidecar (theta, rho, noise_sd, seed, kind) as JSON next to
// the binary; lets scoring runs work from files alone.
void write_truth_sidecar(const std::string& dataset_path, const GroundTruth& truth);
GroundTruth read_truth_sidecar(const std::string& dataset_path);

// Row access used by the training engine. The memory source wraps an
// in-process dataset; the file source actually seeks and reads, so buffer
// loads exercise real storage traffic.
class DataSource {
public:
    virtual ~DataSource() = default;
    virtual std::uint64_t n() const = 0;
    virtual std::uint64_t p() const = 0;
    virtual ResponseKind kind() const = 0;
    // Gathers the given rows, in order, into x_out (rows.size() * p) and
    // y_out (rows.size()).
    virtual void load_rows(std::span<const std::uint32_t> rows, double* x_out,
                           double* y_out) const = 0;
    // Zero-copy view when the data already live in memory (else nullptr);
    // used for whole-dataset metric evaluation.
    virtual const Dataset* try_dataset() const { return nullptr; }
};

class MemorySource final : public DataSource {
public:
    explicit MemorySource(const Dataset& ds) : ds_(&ds) {}
    std::uint64_t n() const override { return ds_->n; }
    std::uint64_t p() const override { return ds_->p; }
    ResponseKind kind() const override { return ds_->kind; }
    void load_rows(std::span<const std::uint32_t> rows, double* x_out,
                   double* y_out) const override;
    const Dataset* try_dataset() const override { return ds_; }

private:
    const Dataset* ds_;
};

class FileSource final : public DataSource {
public:
    explicit FileSource(const std::string& path);
    ~FileSource() override;
    FileSource(const FileSource&) = delete;
    FileSource& operator=(const FileSource&) = delete;

    std::uint64_t n() const override { return n_; }
    std::uint64_t p() const override { return p_; }
    ResponseKind kind() const override { return kind_; }
    void load_rows(std::span<const std::uint32_t> rows, double* x_out,
                   double* y_out) const override;

private:
    std::string path_;
    std::FILE* file_ = nullptr;
    std::uint64_t n_ = 0;
    std::uint64_t p_ = 0;
    ResponseKind kind_ = ResponseKind::linear;
};

}  // namespace bmgd::datagen
