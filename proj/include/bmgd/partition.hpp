#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bmgd::partition {

// How the buffer/mini-batch split evolves over the run:
//   fixed                  same split every iteration and epoch (the
//                          setting the closed-form linear analysis assumes)
//   reshuffle_per_iteration new buffer split and batch split each iteration
//   reshuffle_per_epoch    additionally re-split mini-batches every epoch
enum class Mode { fixed, reshuffle_per_iteration, reshuffle_per_epoch };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

struct PartitionPlan {
    std::uint64_t n = 0;  // dataset rows
    std::uint64_t k = 0;  // buffers
    std::uint64_t m = 0;  // mini-batches per buffer
    Mode mode = Mode::fixed;
    std::uint64_t seed = 0;

    std::uint64_t buffer_size() const { return n / k; }
    std::uint64_t batch_size() const { return n / k / m; }
};

// Validates divisibility (K | N and M | N/K) and bounds.
PartitionPlan make_plan(std::uint64_t n, std::uint64_t k, std::uint64_t m, Mode mode,
                        std::uint64_t seed);

// K disjoint buffers covering 0..n-1 for iteration r (1-based). Each buffer
// is reported in ascending row order, so the k = 1 case is exactly the
// dataset order and buffer loads touch storage monotonically.
std::vector<std::vector<std::uint32_t>> buffers(const PartitionPlan& plan, std::uint64_t r);

// M disjoint mini-batches (global row indices) covering buffer k at
// iteration r, epoch t (all 1-based).
std::vector<std::vector<std::uint32_t>> minibatches(const PartitionPlan& plan, std::uint64_t r,
                                                    std::uint64_t k, std::uint64_t t);

// Same split, but as positions 0..buffer_size-1 into the buffer's canonical
// (ascending) order. This is what the engine applies to a staged buffer
// block; `minibatches` is these positions mapped through `buffers`.
std::vector<std::vector<std::uint32_t>> minibatch_positions(const PartitionPlan& plan,
                                                            std::uint64_t r, std::uint64_t k,
                                                            std::uint64_t t);

// Positions split for a buffer that no longer has the plan's nominal size
// (row filters shrink buffers). Chunks are near-equal (sizes differ by at
// most one, larger chunks first); with `size == buffer_size()` this is
// exactly `minibatch_positions`.
std::vector<std::vector<std::uint32_t>> minibatch_positions_sized(const PartitionPlan& plan,
                                                                  std::uint64_t r, std::uint64_t k,
                                                                  std::uint64_t t,
                                                                  std::uint64_t size);

}  // namespace bmgd::partition
