#pragma once

#include <cstdint>

#include "rdal/learner.hpp"
#include "rdal/rstat.hpp"
#include "rdal/sampling.hpp"
#include "rdal/shared_randomness.hpp"

namespace rdal {

enum class GridPhase { Realizable, AgnosticLoop, AgnosticFinal };

// Grid range top: 1/(8 Theta), 1/(32 Theta) or eps/(64 Theta nu).
double grid_range_top(GridPhase phase, double theta, double eps, double nu);
// max(1, floor(c_grid ln|C| / rho^2)).
std::size_t grid_interval_count(double rho, std::size_t class_size, const Constants& c);

// Draws v_init from [0, 2 range_top) and the selected index from b. For the
// agnostic final phase pass the loop-phase index as `reuse_index`.
ThresholdGrid build_grid(double theta, double rho, std::size_t class_size, GridPhase phase,
                         double eps, double nu, RandomString& rs, const Constants& c,
                         std::optional<std::size_t> reuse_index = std::nullopt);

struct ScheduleParams {
    std::size_t n_max = 1;
    std::uint64_t k = 1;       // labels per loop round
    std::uint64_t k_final = 0; // agnostic final round
    std::uint64_t t = 1;       // unlabeled draws per loop-phase rSTAT call
    std::uint64_t t_final = 0; // unlabeled draws for the final-phase rSTAT call
    SQParams loop_query;
    SQParams final_query;
    double spacing = 0.0;
    double final_spacing = 0.0;
    bool loop_guard_unsatisfiable = false; // agnostic: 16 Theta nu >= 1
};

enum class Setting { Realizable, Agnostic };

// Deterministic in its inputs.
ScheduleParams size_schedule(double theta, double eps, double delta, double rho, double nu,
                             std::size_t class_size, Setting setting, const Constants& c);

RunResult run_replical(const Problem& problem, const LearnerParams& params, RandomString rs,
                       DataStream& data);
RunResult run_replica2(const Problem& problem, const LearnerParams& params, RandomString rs,
                       DataStream& data);

// Random ordering of the class' distinct signatures by b: the survivor that
// comes first in the ordering of all of C. Paired runs with equal survivor
// sets pick the same hypothesis, and nearly equal sets usually do.
HypothesisIndex select_final(const HypothesisClass& cls, const VersionSpace& survivors,
                             RandomString& rs);

} // namespace rdal
