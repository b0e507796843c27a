#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rdal {

using Label = std::uint8_t;
using HypothesisIndex = std::size_t;
using DomainIndex = std::size_t;

// Comparison slack for probabilities that are not exactly representable.
inline constexpr double kProbTolerance = 1e-12;

// A finite class given by its full prediction matrix, one row per hypothesis.
// Rows are the identity of a hypothesis: duplicate rows compare equal.
class HypothesisClass {
public:
    HypothesisClass(std::size_t domain_size, std::vector<std::vector<Label>> rows,
                    std::vector<std::string> names = {});

    static HypothesisClass thresholds(std::size_t n);
    static HypothesisClass intervals(std::size_t n);
    static HypothesisClass worst_case(std::size_t n);

    std::size_t size() const noexcept { return rows_; }
    std::size_t domain_size() const noexcept { return cols_; }

    std::span<const Label> row(HypothesisIndex h) const;
    Label predict(HypothesisIndex h, DomainIndex x) const { return data_[h * cols_ + x]; }
    const std::string& name(HypothesisIndex h) const;

    bool same_signature(HypothesisIndex a, HypothesisIndex b) const;
    // Lowest index whose row equals `labels`, if any.
    std::optional<HypothesisIndex> find_row(std::span<const Label> labels) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Label> data_;
    std::vector<std::string> names_;
};

struct Realizable {
    std::vector<Label> target;
    std::optional<HypothesisIndex> target_index;
};

// Labels are base(x) flipped independently with probability flip(x).
struct Agnostic {
    std::vector<Label> base;
    std::vector<double> flip;
};

using LabelMechanism = std::variant<Realizable, Agnostic>;

class DataModel {
public:
    DataModel(std::vector<double> weights, LabelMechanism mechanism);

    static DataModel realizable(const HypothesisClass& cls, std::vector<double> weights,
                                HypothesisIndex target);
    static DataModel agnostic(std::vector<double> weights, std::vector<Label> base,
                              std::vector<double> flip);
    static std::vector<double> uniform_weights(std::size_t n);

    std::size_t domain_size() const noexcept { return weights_.size(); }
    std::span<const double> weights() const noexcept { return weights_; }
    const LabelMechanism& mechanism() const noexcept { return mechanism_; }
    bool is_realizable() const noexcept { return std::holds_alternative<Realizable>(mechanism_); }

    // Probability that the drawn label at x equals 1.
    double prob_one(DomainIndex x) const;

private:
    std::vector<double> weights_;
    LabelMechanism mechanism_;
};

// Subset of hypothesis indices of one class.
class VersionSpace {
public:
    VersionSpace() = default;
    explicit VersionSpace(std::size_t class_size, bool full = false);
    static VersionSpace all(std::size_t class_size) { return VersionSpace(class_size, true); }
    static VersionSpace of(std::size_t class_size, std::span<const HypothesisIndex> members);

    std::size_t universe() const noexcept { return mask_.size(); }
    std::size_t count() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    bool contains(HypothesisIndex h) const { return mask_.at(h); }
    void insert(HypothesisIndex h);
    void erase(HypothesisIndex h);
    std::vector<HypothesisIndex> members() const;
    bool is_subset_of(const VersionSpace& other) const;

    friend bool operator==(const VersionSpace&, const VersionSpace&) = default;

private:
    std::vector<bool> mask_;
    std::size_t count_ = 0;
};

struct LabeledSample {
    std::vector<DomainIndex> points;
    std::vector<Label> labels;
    std::size_t round = 0;

    std::size_t size() const noexcept { return points.size(); }
};

// Sufficient statistics of a labeled sample: per-point label tallies.
struct LabelCounts {
    std::vector<std::uint64_t> zeros;
    std::vector<std::uint64_t> ones;
    std::uint64_t total = 0;
    std::size_t round = 0;

    explicit LabelCounts(std::size_t domain_size = 0) : zeros(domain_size, 0), ones(domain_size, 0) {}
    static LabelCounts from_sample(const LabeledSample& s, std::size_t domain_size);
};

struct NoiseRate {
    double nu = 0.0;
    HypothesisIndex best = 0;
};

double true_error(const HypothesisClass& cls, const DataModel& model, HypothesisIndex h);
NoiseRate noise_rate(const HypothesisClass& cls, const DataModel& model);

double conditional_empirical_error(const HypothesisClass& cls, const LabeledSample& sample,
                                   HypothesisIndex h);
double conditional_empirical_error(const HypothesisClass& cls, const LabelCounts& counts,
                                   HypothesisIndex h);

// Conditional true error of h under D restricted to `region`.
double conditional_true_error(const HypothesisClass& cls, const DataModel& model,
                              std::span<const DomainIndex> region, HypothesisIndex h);

std::vector<DomainIndex> disagreement_region(const HypothesisClass& cls, const VersionSpace& v);
double region_mass(const DataModel& model, std::span<const DomainIndex> region);
double disagreement_mass(const HypothesisClass& cls, const DataModel& model, const VersionSpace& v);

double hypothesis_distance(const HypothesisClass& cls, const DataModel& model, HypothesisIndex a,
                           HypothesisIndex b);
VersionSpace error_ball(const HypothesisClass& cls, const DataModel& model, HypothesisIndex center,
                        double eps);

// sup over eps > 0 of mass(DIS(B(center, eps))) / eps, evaluated at the
// distinct positive distances from center, where the supremum is attained.
double disagreement_coefficient(const HypothesisClass& cls, const DataModel& model,
                                HypothesisIndex center);

} // namespace rdal
