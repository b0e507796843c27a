#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rdal/hypothesis.hpp"
#include "rdal/learner.hpp"

namespace rdal {

// Hypothesis counts per grid interval I_i = [v_init + i s, v_init + (i+1) s),
// i = 0..count. I_0 also absorbs errors below v_init; errors at or beyond the
// range top are tallied in `overflow` and take no part in the badness tests.
struct IntervalProfile {
    ThresholdGrid grid;
    std::vector<std::size_t> counts;     // count + 1 intervals
    std::vector<std::size_t> cumulative; // |I_[i]|
    std::size_t overflow = 0;
    std::vector<double> reference_errors;
};

IntervalProfile make_profile(const ThresholdGrid& grid, std::vector<double> reference_errors);

// Conditional true error on DIS(members) minus `sigma`, for each member.
std::vector<double> conditional_reference_errors(const HypothesisClass& cls, const DataModel& model,
                                                 std::span<const HypothesisIndex> members,
                                                 double sigma = 0.0);

// Flags for intervals 0..count; index i is the interval holding selectable
// threshold i - 1. Interval 0 is never selectable and never flagged.
std::vector<bool> classify_thresholds(const IntervalProfile& profile, double rho);

// Flagged share of the selectable thresholds (intervals 1..count).
double bad_fraction(const IntervalProfile& profile, double rho);

struct PairedSets {
    std::vector<std::vector<Label>> first;
    std::vector<std::vector<Label>> second;
};

struct Divergence {
    double ratio = 0.0;
    bool both_empty = false;
};

// |H1 symmetric-difference H2| / |H1 union H2| over signatures.
Divergence set_divergence(const PairedSets& sets);

// Profile of a finished replicable run at its own last labeled round: the
// members entering that round against the grid it thresholded with. Runs that
// never sampled are profiled over the whole class.
IntervalProfile run_profile(const Problem& problem, const RunResult& result);

PairedSets survivor_sets(const HypothesisClass& cls, const RunResult& a, const RunResult& b);

} // namespace rdal
