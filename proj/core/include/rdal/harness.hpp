#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdal/hypothesis.hpp"
#include "rdal/learner.hpp"
#include "rdal/sampling.hpp"
#include "rdal/shared_randomness.hpp"

namespace rdal {

struct ClassSpec {
    std::string generator = "thresholds"; // thresholds | intervals | worst_case | explicit
    std::size_t size = 128;
    std::vector<std::vector<Label>> matrix;
};

struct DistributionSpec {
    std::string kind = "uniform"; // uniform | explicit
    std::vector<double> weights;
};

struct OracleSpec {
    std::string kind = "realizable"; // realizable | agnostic
    std::optional<HypothesisIndex> target; // generator default when unset
    std::vector<Label> base_labels;        // agnostic; defaults to the target row
    std::optional<double> eta;             // agnostic, constant flip rate
    std::vector<double> eta_per_point;     // agnostic, overrides `eta`
};

enum class SeedPolicy { Fixed, PerTrial };

struct ExperimentConfig {
    ClassSpec hypothesis_class;
    DistributionSpec distribution;
    OracleSpec oracle;
    std::string algorithm = "cal"; // erm | cal | a2 | replical | replica2
    std::vector<std::string> sweep_algorithms;
    std::vector<double> sweep_epsilons;
    double epsilon = 0.05;
    double delta = 0.05;
    double rho = 0.3;
    std::optional<double> nu;    // overrides the exact noise rate given to learners
    std::optional<double> theta; // overrides the exact disagreement coefficient
    Constants constants;
    std::size_t trials = 100;
    SeedPolicy b_seed_policy = SeedPolicy::PerTrial;
    std::string b_seed = "0";
    std::uint64_t data_seed = 0;
    bool stream_accounting = false;
    bool same_data_both_sides = false;
    unsigned threads = 1;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);
// Throws ParameterError/InputError on out-of-range values.
void validate(const ExperimentConfig& cfg);

struct Instance {
    HypothesisClass cls;
    DataModel model;
};

Instance build_instance(const ExperimentConfig& cfg);
HypothesisIndex default_target(const ClassSpec& spec);

using Learner =
    std::function<RunResult(const Problem&, const LearnerParams&, RandomString, DataStream&)>;

Learner learner_for(const std::string& algo);
LearnerParams learner_params(const ExperimentConfig& cfg);

struct TrialSeeds {
    RandomString b;
    std::uint64_t data_first = 0;
    std::uint64_t data_second = 0;
};

// Depends only on (cfg seeds, policy, index).
TrialSeeds trial_seeds(const ExperimentConfig& cfg, std::size_t index);

struct TrialRecord {
    std::size_t trial = 0;
    std::size_t side = 0;
    std::string algo;
    double epsilon = 0, delta = 0, rho = 0, nu = 0, theta = 0;
    std::uint64_t labels_used = 0;
    std::uint64_t unlabeled_used = 0;
    std::size_t rounds = 0;
    double err_final = 0;
    std::uint64_t signature_hash = 0;
    std::string b_seed;
    std::uint64_t data_seed = 0;
    bool agreed = false;
    std::string failure; // empty on success

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct ErrorStats {
    std::size_t runs = 0;
    double mean = 0;
    double max = 0;
    std::size_t within_target = 0; // err <= nu + eps

    friend bool operator==(const ErrorStats&, const ErrorStats&) = default;
};

struct ReplicabilityReport {
    std::string algo;
    std::string b_seed;
    std::uint64_t data_seed = 0;
    std::size_t pairs = 0;
    std::size_t agreements = 0;
    std::size_t failed_pairs = 0;
    double agreement_rate = 0;
    double wilson_low = 0;
    double wilson_high = 0;
    ErrorStats first_side;
    ErrorStats second_side;
    double mean_labels = 0;
    std::uint64_t max_labels = 0;
    double mean_unlabeled = 0;
    std::uint64_t max_unlabeled = 0;
    std::size_t round_transitions = 0;
    std::size_t halving_transitions = 0;
    double halving_frequency = 0;
    std::map<std::string, std::size_t> failure_categories;
    std::vector<TrialRecord> records;

    friend bool operator==(const ReplicabilityReport&, const ReplicabilityReport&) = default;
};

struct WilsonInterval {
    double low = 0;
    double high = 0;
};
WilsonInterval wilson_interval(std::size_t successes, std::size_t n, double z = 1.959963984540054);

ReplicabilityReport run_paired_trials(const ExperimentConfig& cfg);
ReplicabilityReport run_paired_trials(const ExperimentConfig& cfg, const Learner& learner);

struct SweepRow {
    std::string algo;
    double epsilon = 0;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double mean_labels = 0;
    std::uint64_t max_labels = 0;
    double mean_unlabeled = 0;
    double mean_rounds = 0;
    double mean_err = 0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

// Single (unpaired) runs of every configured algorithm at each epsilon.
SweepTable label_complexity_sweep(const ExperimentConfig& cfg, const std::vector<double>& eps_list);

enum class ExportFormat { Csv, Json };

std::string report_csv(const ReplicabilityReport& report);
std::string report_json(const ReplicabilityReport& report);
ReplicabilityReport report_from_json(std::string_view json_text);
std::string sweep_csv(const SweepTable& table);
std::string sweep_json(const SweepTable& table);
std::string run_result_json(const RunResult& result, const Problem& problem);

void export_report(const ReplicabilityReport& report, const std::string& path, ExportFormat format);
void export_sweep(const SweepTable& table, const std::string& path, ExportFormat format);

// Shortest round-trip decimal form; used everywhere numbers are serialized.
std::string format_double(double v);

} // namespace rdal
