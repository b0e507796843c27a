#pragma once

#include <cstdint>

#include "rdal/learner.hpp"
#include "rdal/sampling.hpp"

namespace rdal {

// Non-replicable reference learners.

// m = ceil(c_pass / eps * ln(|C| / delta)) labels from D, empirical minimizer.
RunResult run_passive_erm(const Problem& problem, const LearnerParams& params, DataStream& data);

// CAL, realizable only. k = ceil(c_cal * Theta * ln(|C| N / delta)) labels per
// round with N = ceil(log2(2/eps)); loops while the exact mass of DIS(V) exceeds eps.
RunResult run_cal(const Problem& problem, const LearnerParams& params, DataStream& data);

// A2 with Hoeffding LB/UB elimination; final empirical minimizer on k' labels.
RunResult run_a2(const Problem& problem, const LearnerParams& params, DataStream& data);

// Members consistent with every tallied label.
VersionSpace cal_eliminate(const HypothesisClass& cls, const VersionSpace& v, const LabelCounts& counts);
// Members whose lower bound err - radius does not exceed the smallest upper bound err + radius.
VersionSpace a2_eliminate(const HypothesisClass& cls, const VersionSpace& v, const LabelCounts& counts,
                          double radius);

std::size_t cal_round_bound(double eps);
std::size_t a2_round_bound(double theta, double nu, double eps);

} // namespace rdal
