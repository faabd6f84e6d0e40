#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

// Pinned random number generation. Everything stochastic in the library
// flows through this header so that a (seed, purpose) pair identifies a
// reproducible stream on any platform:
//
//   * bit mixing / stream derivation: splitmix64 finalizer
//   * generator: xoshiro256++ (Blackman & Vigna), seeded from splitmix64
//   * uniform doubles: high 53 bits, [0, 1)
//   * bounded integers: Lemire multiply-shift (bias < 2^-64, deterministic)
//   * normals: Box-Muller with a cached spare
//   * shuffles: Fisher-Yates driven by the above
//
// Integer and uniform streams are bit-stable across platforms. Box-Muller
// calls libm (log/cos/sin), so normal streams are bit-stable per libm build;
// see the README note on reproducibility.

namespace bmgd::rng {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer: one step of the mix function.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    state += kGolden;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives a child seed from (seed, tag words). Used to give every row,
// buffer shuffle, epoch shuffle, restart, ... its own independent stream
// that does not depend on evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    for (std::uint64_t t : tags) {
        s ^= t + kGolden + (s << 6) + (s >> 2);
        (void)splitmix64(s);
    }
    return s;
}

// Stream-purpose tags. Keeping them in one place avoids accidental overlap
// between, say, the theta stream and the row streams of the same seed.
enum Tag : std::uint64_t {
    kTagTheta = 1,
    kTagDesignRow = 2,
    kTagNoise = 3,
    kTagBufferShuffle = 4,
    kTagMinibatchShuffle = 5,
    kTagRestart = 6,
    kTagReplicate = 7,
};

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer on [0, bound). Lemire multiply-shift; the residual
    // bias (< bound / 2^64) is far below anything observable here.
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    // Standard normal via Box-Muller; generates pairs, returns them one at
    // a time.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        // Guard against log(0); pushing u1 to the smallest representable
        // uniform keeps the map deterministic.
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace bmgd::rng
