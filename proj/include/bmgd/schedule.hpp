#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace bmgd::schedule {

// Learning-rate / epoch-count strategies. An iteration r runs T_r epochs at
// rate alpha_r; the cosine variant additionally varies the rate inside the
// iteration by update index.

struct Constant {
    double alpha;
    std::uint64_t t;
};

// Constant rate tuned from the curvature constant and the run geometry:
// alpha = 2 log(sqrt(M T K) R) / (mu M T K R). For gradient-dominated
// losses this balances the contraction against the noise floor for a run
// of exactly R iterations.
struct PlTuned {
    double mu;
    std::uint64_t m, t, k, r;
};

// alpha_r = c * r^-gamma.
struct Polynomial {
    double c;
    double gamma;
    std::uint64_t t;
};

// alpha_r = c * gamma^(r/b), gamma in (0,1).
struct Exponential {
    double c;
    double gamma;
    double b;
    std::uint64_t t;
};

struct Stage {
    double alpha;
    std::uint64_t t;
    std::uint64_t iterations;
};

struct StageWise {
    std::vector<Stage> stages;
};

// Within-iteration cosine wave: for update j = 1..T*M*K of any iteration,
// alpha_{r,j} = (alpha_max/2) * (1 + cos(j pi / (T M K))); starts at
// ~alpha_max, ends the iteration at exactly 0.
struct Cosine {
    double alpha_max;
    std::uint64_t t, m, k;
};

using Schedule = std::variant<Constant, PlTuned, Polynomial, Exponential, StageWise, Cosine>;

std::string variant_name(const Schedule& sched);

// Validates parameter domains; throws InvalidArgumentError.
void validate(const Schedule& sched);

struct RatePoint {
    double alpha;
    std::uint64_t t;
};

// Rate and epoch count for iteration r (1-based). For Cosine, j (1-based
// update index within the iteration) selects the point on the wave; other
// variants ignore j. StageWise throws ScheduleExhaustedError past its last
// stage.
RatePoint rate(const Schedule& sched, std::uint64_t r, std::uint64_t j = 1);

// Total iterations a StageWise schedule defines (0 for infinite variants).
std::uint64_t defined_iterations(const Schedule& sched);

// Diminishing-step admissibility: a schedule drives the iterate all the way
// to the optimum iff (i) sum alpha_r T_r diverges while alpha_R T_R shrinks
// faster than 1/log R, and (ii) sum (alpha_r T_r)^3 converges. The checker
// classifies each variant analytically and reports numeric partial sums
// over `horizon` iterations for transparency.
struct ConditionReport {
    std::string variant;
    bool asymptotics_apply;     // false for finite (stage-wise) schedules
    bool sum_diverges;
    bool tail_vanishes;         // alpha_R T_R -> 0 fast enough (o(1/log R))
    bool cube_sum_converges;
    bool admissible;
    std::string verdict;
    std::uint64_t horizon;
    double partial_sum;         // sum_{r<=horizon} alpha_r T_r
    double partial_cube_sum;    // sum_{r<=horizon} (alpha_r T_r)^3
    double total_sum_bound;     // finite bound on sum alpha_r T_r, 0 if none
};

ConditionReport check_conditions(const Schedule& sched, std::uint64_t horizon = 10000);

}  // namespace bmgd::schedule
