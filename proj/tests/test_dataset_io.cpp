#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "bmgd/dataset.hpp"
#include "bmgd/dataset_io.hpp"
#include "bmgd/error.hpp"

using namespace bmgd;

namespace {

struct TempDir {
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("bmgd_io_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    std::filesystem::path path;
};

datagen::Dataset sample_dataset() {
    return datagen::gen_linear_dataset({32, 3, 0.5, 1.0, 4}).first;
}

// Flip or truncate bytes of a written file.
void corrupt(const std::string& path, std::uint64_t offset, unsigned char value) {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(static_cast<std::streamoff>(offset));
    f.write(reinterpret_cast<const char*>(&value), 1);
}

void truncate_to(const std::string& path, std::uint64_t size) {
    std::filesystem::resize_file(path, size);
}

}  // namespace

TEST_CASE("round trip preserves every byte of payload") {
    TempDir tmp;
    const auto ds = sample_dataset();
    const std::string path = tmp.file("ds.bin");
    datagen::write_dataset(path, ds);

    const datagen::Dataset back = datagen::read_dataset(path);
    CHECK(back.n == ds.n);
    CHECK(back.p == ds.p);
    CHECK(back.kind == ds.kind);
    CHECK(back.x == ds.x);  // bitwise
    CHECK(back.y == ds.y);

    // 32-byte header + doubles.
    CHECK(std::filesystem::file_size(path) == 32 + 8 * (ds.n * ds.p + ds.n));
}

TEST_CASE("truth sidecar round trips") {
    TempDir tmp;
    const auto [ds, truth] = datagen::gen_linear_dataset({16, 4, 0.3, 0.7, 11});
    const std::string path = tmp.file("ds.bin");
    datagen::write_dataset(path, ds);
    datagen::write_truth_sidecar(path, truth);

    const datagen::GroundTruth back = datagen::read_truth_sidecar(path);
    CHECK(back.theta == truth.theta);
    CHECK(back.rho == truth.rho);
    CHECK(back.noise_sd == truth.noise_sd);
    CHECK(back.seed == truth.seed);
    CHECK(back.kind == truth.kind);
}

TEST_CASE("corruption is reported with the byte offset") {
    TempDir tmp;
    const auto ds = sample_dataset();

    auto fresh = [&](const char* name) {
        const std::string path = tmp.file(name);
        datagen::write_dataset(path, ds);
        return path;
    };

    SUBCASE("bad magic points at byte 0") {
        const auto path = fresh("magic.bin");
        corrupt(path, 0, 'X');
        try {
            (void)datagen::read_dataset(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset == 0);
        }
    }

    SUBCASE("unsupported version points at byte 4") {
        const auto path = fresh("version.bin");
        corrupt(path, 4, 9);
        try {
            (void)datagen::read_dataset(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset == 4);
        }
    }

    SUBCASE("bad response kind points at byte 24") {
        const auto path = fresh("kind.bin");
        corrupt(path, 24, 7);
        try {
            (void)datagen::read_dataset(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset == 24);
        }
    }

    SUBCASE("dirty reserved byte is caught") {
        const auto path = fresh("reserved.bin");
        corrupt(path, 28, 1);
        try {
            (void)datagen::read_dataset(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset == 28);
        }
    }

    SUBCASE("payload truncation reports a payload offset") {
        const auto path = fresh("trunc.bin");
        truncate_to(path, 32 + 8 * 10);  // cut mid-design
        try {
            (void)datagen::read_dataset(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset >= 32);
        }
    }

    SUBCASE("header truncation is caught") {
        const auto path = fresh("tiny.bin");
        truncate_to(path, 12);
        CHECK_THROWS_AS((void)datagen::read_dataset(path), FormatError);
    }

    SUBCASE("trailing garbage is rejected") {
        const auto path = fresh("trailing.bin");
        std::ofstream app(path, std::ios::app | std::ios::binary);
        app << "extra";
        app.close();
        try {
            (void)datagen::read_dataset(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset == 32 + 8 * (ds.n * ds.p + ds.n));
        }
    }

    SUBCASE("non-finite payload value is rejected") {
        const auto path = fresh("nan.bin");
        // A quiet NaN: set the exponent bits of the first design double.
        for (int b = 0; b < 8; ++b) corrupt(path, 32 + b, 0xff);
        CHECK_THROWS_AS((void)datagen::read_dataset(path), FormatError);
    }
}

TEST_CASE("missing files raise IoError") {
    CHECK_THROWS_AS((void)datagen::read_dataset("/nonexistent/nowhere.bin"), IoError);
    CHECK_THROWS_AS((void)datagen::read_truth_sidecar("/nonexistent/nowhere.bin"), IoError);
    const auto ds = sample_dataset();
    CHECK_THROWS_AS(datagen::write_dataset("/nonexistent/dir/out.bin", ds), IoError);
}

TEST_CASE("file source serves the same rows as the memory source") {
    TempDir tmp;
    const auto ds = sample_dataset();
    const std::string path = tmp.file("src.bin");
    datagen::write_dataset(path, ds);

    datagen::MemorySource mem(ds);
    datagen::FileSource file(path);
    CHECK(file.n() == ds.n);
    CHECK(file.p() == ds.p);
    CHECK(file.kind() == ds.kind);
    CHECK(file.try_dataset() == nullptr);
    CHECK(mem.try_dataset() == &ds);

    const std::vector<std::uint32_t> rows{0, 31, 7, 7, 15};
    std::vector<double> xm(rows.size() * ds.p), ym(rows.size());
    std::vector<double> xf(rows.size() * ds.p), yf(rows.size());
    mem.load_rows(rows, xm.data(), ym.data());
    file.load_rows(rows, xf.data(), yf.data());
    CHECK(xm == xf);
    CHECK(ym == yf);

    CHECK_THROWS_AS(file.load_rows(std::vector<std::uint32_t>{32}, xf.data(), yf.data()),
                    InvalidArgumentError);
}

TEST_CASE("write_dataset validates shape agreement") {
    datagen::Dataset ds = sample_dataset();
    ds.y.pop_back();
    TempDir tmp;
    CHECK_THROWS_AS(datagen::write_dataset(tmp.file("bad.bin"), ds), InvalidArgumentError);
}
