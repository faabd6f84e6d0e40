#include "bmgd/partition.hpp"

#include <algorithm>
#include <numeric>

#include "bmgd/error.hpp"
#include "bmgd/rng.hpp"

namespace bmgd::partition {

Mode mode_from_string(const std::string& s) {
    if (s == "fixed") return Mode::fixed;
    if (s == "reshuffle_per_iteration") return Mode::reshuffle_per_iteration;
    if (s == "reshuffle_per_epoch") return Mode::reshuffle_per_epoch;
    throw ConfigError("unknown partition mode '" + s +
                      "' (expected fixed | reshuffle_per_iteration | reshuffle_per_epoch)");
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::fixed: return "fixed";
        case Mode::reshuffle_per_iteration: return "reshuffle_per_iteration";
        case Mode::reshuffle_per_epoch: return "reshuffle_per_epoch";
    }
    return "?";
}

PartitionPlan make_plan(std::uint64_t n, std::uint64_t k, std::uint64_t m, Mode mode,
                        std::uint64_t seed) {
    if (n == 0 || k == 0 || m == 0)
        throw InvalidArgumentError("make_plan: n, K, M must all be positive");
    if (n > 0xffffffffULL)
        throw InvalidArgumentError("make_plan: row indices are 32-bit; n too large");
    if (n % k != 0)
        throw InvalidArgumentError("make_plan: K = " + std::to_string(k) +
                                   " does not divide n = " + std::to_string(n));
    if ((n / k) % m != 0)
        throw InvalidArgumentError("make_plan: M = " + std::to_string(m) +
                                   " does not divide the buffer size " + std::to_string(n / k));
    return PartitionPlan{n, k, m, mode, seed};
}

namespace {

void check_r(const PartitionPlan& plan, std::uint64_t r) {
    (void)plan;
    if (r == 0) throw InvalidArgumentError("partition: iteration index r is 1-based");
}

// Iteration label whose shuffle stream the buffer split uses.
std::uint64_t buffer_epoch_label(const PartitionPlan& plan, std::uint64_t r) {
    return plan.mode == Mode::fixed ? 1 : r;
}

// (r, t) labels for the mini-batch split of a given epoch.
std::pair<std::uint64_t, std::uint64_t> batch_labels(const PartitionPlan& plan, std::uint64_t r,
                                                     std::uint64_t t) {
    switch (plan.mode) {
        case Mode::fixed: return {1, 1};
        case Mode::reshuffle_per_iteration: return {r, 1};
        case Mode::reshuffle_per_epoch: return {r, t};
    }
    return {1, 1};
}

}  // namespace

std::vector<std::vector<std::uint32_t>> buffers(const PartitionPlan& plan, std::uint64_t r) {
    check_r(plan, r);
    const std::uint64_t n0 = plan.buffer_size();
    std::vector<std::uint32_t> order(plan.n);
    std::iota(order.begin(), order.end(), 0u);
    if (plan.mode != Mode::fixed) {
        rng::Xoshiro256pp gen(
            rng::derive_seed(plan.seed, {rng::kTagBufferShuffle, buffer_epoch_label(plan, r)}));
        gen.shuffle(order);
    }
    std::vector<std::vector<std::uint32_t>> out(plan.k);
    for (std::uint64_t k = 0; k < plan.k; ++k) {
        out[k].assign(order.begin() + static_cast<std::ptrdiff_t>(k * n0),
                      order.begin() + static_cast<std::ptrdiff_t>((k + 1) * n0));
        // Canonical ascending order inside each buffer (see header).
        std::sort(out[k].begin(), out[k].end());
    }
    return out;
}

std::vector<std::vector<std::uint32_t>> minibatch_positions_sized(const PartitionPlan& plan,
                                                                  std::uint64_t r, std::uint64_t k,
                                                                  std::uint64_t t,
                                                                  std::uint64_t size) {
    check_r(plan, r);
    if (k == 0 || k > plan.k)
        throw InvalidArgumentError("partition: buffer index k = " + std::to_string(k) +
                                   " outside 1.." + std::to_string(plan.k));
    if (t == 0) throw InvalidArgumentError("partition: epoch index t is 1-based");

    std::vector<std::uint32_t> pos(size);
    std::iota(pos.begin(), pos.end(), 0u);
    const auto [rl, tl] = batch_labels(plan, r, t);
    rng::Xoshiro256pp gen(rng::derive_seed(plan.seed, {rng::kTagMinibatchShuffle, rl, k, tl}));
    gen.shuffle(pos);

    std::vector<std::vector<std::uint32_t>> out(plan.m);
    const std::uint64_t base = size / plan.m;
    const std::uint64_t extra = size % plan.m;
    std::uint64_t at = 0;
    for (std::uint64_t m = 0; m < plan.m; ++m) {
        const std::uint64_t len = base + (m < extra ? 1 : 0);
        out[m].assign(pos.begin() + static_cast<std::ptrdiff_t>(at),
                      pos.begin() + static_cast<std::ptrdiff_t>(at + len));
        at += len;
    }
    return out;
}

std::vector<std::vector<std::uint32_t>> minibatch_positions(const PartitionPlan& plan,
                                                            std::uint64_t r, std::uint64_t k,
                                                            std::uint64_t t) {
    return minibatch_positions_sized(plan, r, k, t, plan.buffer_size());
}

std::vector<std::vector<std::uint32_t>> minibatches(const PartitionPlan& plan, std::uint64_t r,
                                                    std::uint64_t k, std::uint64_t t) {
    const auto buf = buffers(plan, r);
    const auto& mine = buf[k - 1];
    auto out = minibatch_positions(plan, r, k, t);
    for (auto& batch : out)
        for (auto& idx : batch) idx = mine[idx];
    return out;
}

}  // namespace bmgd::partition
