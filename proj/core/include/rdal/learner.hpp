#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rdal/hypothesis.hpp"

namespace rdal {

// Constants hidden by the big-O sample sizes. All are overridable from config
// under the names accepted by set_constant().
struct Constants {
    double c_pass = 2.0;      // passive ERM sample size
    double c_cal = 2.0;       // CAL per-round labels
    double c_a2 = 128.0;      // A2 per-round labels
    double c_a2_final = 128.0;// A2 final labels
    double c_k1 = 2.0;        // replicable learners: accuracy part of k
    double c_k2 = 1.0;        // replicable learners: thresholding part of k
    double c_k3 = 1.0;        // ReplicA2: accuracy part of the final k'
    double c_grid = 1.0;      // grid interval count
    double c_T = 2.0;         // unlabeled sample multiplier over the rSTAT requirement
    std::optional<double> forced_spacing; // grid spacing override; must divide the range

    // Returns false for an unknown key.
    bool set(const std::string& key, double value);
};

// A class/model pair together with the quantities the learners treat as known.
struct Problem {
    const HypothesisClass& cls;
    const DataModel& model;
    double theta;
    double nu;
    HypothesisIndex best; // h*, lowest-index minimizer of true error
};

// Computes nu, h* and Theta (centered at h*) exactly unless overridden.
Problem make_problem(const HypothesisClass& cls, const DataModel& model,
                     std::optional<double> theta_override = std::nullopt,
                     std::optional<double> nu_override = std::nullopt);

struct LearnerParams {
    double epsilon = 0.05;
    double delta = 0.05;
    double rho = 0.3;
    Constants constants;
    bool stream_accounting = false;
};

struct ThresholdGrid {
    double v_init = 0.0;
    double spacing = 0.0;
    std::size_t count = 1;
    std::size_t selected_index = 0;
    double range_top = 0.0;

    // Selectable threshold i: v_init + (i + 3/2) spacing, i < count.
    double threshold(std::size_t i) const { return v_init + (static_cast<double>(i) + 1.5) * spacing; }
    double selected() const { return threshold(selected_index); }
};

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

struct RoundRecord {
    std::size_t round = 0;
    double delta_hat = kNotApplicable;  // estimate the loop guard used
    double delta_true = kNotApplicable; // exact mass of DIS(V) entering the round
    std::size_t version_size = 0;       // |V| entering the round
    std::size_t survivors = 0;          // |V| after the update
    double threshold = kNotApplicable;
    double sigma = kNotApplicable;
    std::uint64_t labels_so_far = 0;
};

struct RunResult {
    std::string algo;
    HypothesisIndex hypothesis = 0;
    std::vector<Label> signature;
    std::uint64_t labels_used = 0;
    std::uint64_t unlabeled_used = 0;
    std::size_t rounds = 0;
    double final_disagreement_estimate = 0.0;
    std::vector<RoundRecord> trace;
    std::vector<HypothesisIndex> survivors;
    // V entering the last labeled update; empty when no update ran.
    std::vector<HypothesisIndex> last_round_members;
    double last_round_sigma = 0.0;
    std::optional<ThresholdGrid> grid;
    std::optional<ThresholdGrid> final_grid;
    std::vector<std::string> flags;

    std::uint64_t signature_hash() const;
    bool has_flag(const std::string& f) const;
};

std::string signature_string(const std::vector<Label>& sig);

} // namespace rdal
