#include "rdal/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rdal/errors.hpp"

namespace rdal {

namespace {

const std::string kEmptyName;

void require_index(const HypothesisClass& cls, HypothesisIndex h) {
    if (h >= cls.size())
        throw Error(ErrorCode::Precondition, "hypothesis index " + std::to_string(h) + " out of range");
}

} // namespace

HypothesisClass::HypothesisClass(std::size_t domain_size, std::vector<std::vector<Label>> rows,
                                 std::vector<std::string> names)
    : rows_(rows.size()), cols_(domain_size), names_(std::move(names)) {
    if (rows_ == 0 || cols_ == 0)
        throw Error(ErrorCode::InputError, "hypothesis class needs at least one hypothesis and one point");
    if (!names_.empty() && names_.size() != rows_)
        throw Error(ErrorCode::InputError, "names must match the number of hypotheses");
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            throw Error(ErrorCode::InputError, "prediction row length differs from domain size");
        for (Label y : r) {
            if (y > 1) throw Error(ErrorCode::InputError, "predictions must be 0 or 1");
            data_.push_back(y);
        }
    }
}

// h_t(x) = 1 iff x >= t over X = {1..n}, t = 1..n+1; h_t has index t-1.
HypothesisClass HypothesisClass::thresholds(std::size_t n) {
    std::vector<std::vector<Label>> rows(n + 1, std::vector<Label>(n, 0));
    std::vector<std::string> names;
    for (std::size_t t = 1; t <= n + 1; ++t) {
        for (std::size_t x = 1; x <= n; ++x) rows[t - 1][x - 1] = x >= t ? 1 : 0;
        names.push_back("h" + std::to_string(t));
    }
    return HypothesisClass(n, std::move(rows), std::move(names));
}

// The empty labeling followed by every [a,b], 1 <= a <= b <= n.
HypothesisClass HypothesisClass::intervals(std::size_t n) {
    std::vector<std::vector<Label>> rows;
    std::vector<std::string> names;
    rows.emplace_back(n, 0);
    names.emplace_back("empty");
    for (std::size_t a = 1; a <= n; ++a) {
        for (std::size_t b = a; b <= n; ++b) {
            std::vector<Label> r(n, 0);
            for (std::size_t x = a; x <= b; ++x) r[x - 1] = 1;
            rows.push_back(std::move(r));
            names.push_back("[" + std::to_string(a) + "," + std::to_string(b) + "]");
        }
    }
    return HypothesisClass(n, std::move(rows), std::move(names));
}

// Target (all zeros, index 0) plus n hypotheses each wrong on one distinct point.
HypothesisClass HypothesisClass::worst_case(std::size_t n) {
    std::vector<std::vector<Label>> rows(n + 1, std::vector<Label>(n, 0));
    std::vector<std::string> names{"target"};
    for (std::size_t i = 0; i < n; ++i) {
        rows[i + 1][i] = 1;
        names.push_back("miss" + std::to_string(i + 1));
    }
    return HypothesisClass(n, std::move(rows), std::move(names));
}

std::span<const Label> HypothesisClass::row(HypothesisIndex h) const {
    require_index(*this, h);
    return {data_.data() + h * cols_, cols_};
}

const std::string& HypothesisClass::name(HypothesisIndex h) const {
    require_index(*this, h);
    return names_.empty() ? kEmptyName : names_[h];
}

bool HypothesisClass::same_signature(HypothesisIndex a, HypothesisIndex b) const {
    auto ra = row(a);
    auto rb = row(b);
    return std::equal(ra.begin(), ra.end(), rb.begin());
}

std::optional<HypothesisIndex> HypothesisClass::find_row(std::span<const Label> labels) const {
    if (labels.size() != cols_) return std::nullopt;
    for (HypothesisIndex h = 0; h < rows_; ++h) {
        auto r = row(h);
        if (std::equal(r.begin(), r.end(), labels.begin())) return h;
    }
    return std::nullopt;
}

DataModel::DataModel(std::vector<double> weights, LabelMechanism mechanism)
    : weights_(std::move(weights)), mechanism_(std::move(mechanism)) {
    if (weights_.empty()) throw Error(ErrorCode::InputError, "distribution over an empty domain");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InputError, "weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > kProbTolerance)
        throw Error(ErrorCode::InputError, "weights must sum to 1");
    const std::size_t n = weights_.size();
    if (auto* r = std::get_if<Realizable>(&mechanism_)) {
        if (r->target.size() != n) throw Error(ErrorCode::InputError, "target row length differs from domain size");
        for (Label y : r->target)
            if (y > 1) throw Error(ErrorCode::InputError, "labels must be 0 or 1");
    } else {
        auto& a = std::get<Agnostic>(mechanism_);
        if (a.base.size() != n || a.flip.size() != n)
            throw Error(ErrorCode::InputError, "base labels and flip rates must cover the domain");
        for (Label y : a.base)
            if (y > 1) throw Error(ErrorCode::InputError, "labels must be 0 or 1");
        for (double eta : a.flip)
            if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::InputError, "flip rates must lie in [0,1]");
    }
}

DataModel DataModel::realizable(const HypothesisClass& cls, std::vector<double> weights,
                                HypothesisIndex target) {
    auto r = cls.row(target);
    return DataModel(std::move(weights), Realizable{{r.begin(), r.end()}, target});
}

DataModel DataModel::agnostic(std::vector<double> weights, std::vector<Label> base,
                              std::vector<double> flip) {
    return DataModel(std::move(weights), Agnostic{std::move(base), std::move(flip)});
}

std::vector<double> DataModel::uniform_weights(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

double DataModel::prob_one(DomainIndex x) const {
    if (auto* r = std::get_if<Realizable>(&mechanism_)) return r->target.at(x);
    const auto& a = std::get<Agnostic>(mechanism_);
    return a.base.at(x) ? 1.0 - a.flip[x] : a.flip[x];
}

VersionSpace::VersionSpace(std::size_t class_size, bool full)
    : mask_(class_size, full), count_(full ? class_size : 0) {}

VersionSpace VersionSpace::of(std::size_t class_size, std::span<const HypothesisIndex> members) {
    VersionSpace v(class_size);
    for (auto h : members) v.insert(h);
    return v;
}

void VersionSpace::insert(HypothesisIndex h) {
    if (h >= mask_.size()) throw Error(ErrorCode::Precondition, "version space member out of range");
    if (!mask_[h]) {
        mask_[h] = true;
        ++count_;
    }
}

void VersionSpace::erase(HypothesisIndex h) {
    if (h < mask_.size() && mask_[h]) {
        mask_[h] = false;
        --count_;
    }
}

std::vector<HypothesisIndex> VersionSpace::members() const {
    std::vector<HypothesisIndex> out;
    out.reserve(count_);
    for (std::size_t h = 0; h < mask_.size(); ++h)
        if (mask_[h]) out.push_back(h);
    return out;
}

bool VersionSpace::is_subset_of(const VersionSpace& other) const {
    if (other.universe() != universe()) return false;
    for (std::size_t h = 0; h < mask_.size(); ++h)
        if (mask_[h] && !other.mask_[h]) return false;
    return true;
}

LabelCounts LabelCounts::from_sample(const LabeledSample& s, std::size_t domain_size) {
    LabelCounts c(domain_size);
    c.round = s.round;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.labels[i]) ++c.ones.at(s.points[i]);
        else ++c.zeros.at(s.points[i]);
    }
    c.total = s.size();
    return c;
}

double true_error(const HypothesisClass& cls, const DataModel& model, HypothesisIndex h) {
    auto r = cls.row(h);
    const auto w = model.weights();
    double err = 0.0;
    if (auto* real = std::get_if<Realizable>(&model.mechanism())) {
        for (std::size_t x = 0; x < w.size(); ++x)
            if (r[x] != real->target[x]) err += w[x];
        return err;
    }
    const auto& a = std::get<Agnostic>(model.mechanism());
    for (std::size_t x = 0; x < w.size(); ++x)
        err += w[x] * (r[x] == a.base[x] ? a.flip[x] : 1.0 - a.flip[x]);
    return err;
}

NoiseRate noise_rate(const HypothesisClass& cls, const DataModel& model) {
    NoiseRate best{true_error(cls, model, 0), 0};
    for (HypothesisIndex h = 1; h < cls.size(); ++h) {
        const double e = true_error(cls, model, h);
        if (e < best.nu - kProbTolerance) best = {e, h};
    }
    if (model.is_realizable() && best.nu <= kProbTolerance) best.nu = 0.0;
    return best;
}

double conditional_empirical_error(const HypothesisClass& cls, const LabeledSample& sample,
                                   HypothesisIndex h) {
    if (sample.size() == 0) throw Error(ErrorCode::Precondition, "empirical error of an empty sample");
    if (sample.labels.size() != sample.points.size())
        throw Error(ErrorCode::InputError, "sample points and labels differ in length");
    auto r = cls.row(h);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < sample.size(); ++i)
        if (r[sample.points[i]] != sample.labels[i]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(sample.size());
}

double conditional_empirical_error(const HypothesisClass& cls, const LabelCounts& counts,
                                   HypothesisIndex h) {
    if (counts.total == 0) throw Error(ErrorCode::Precondition, "empirical error of an empty sample");
    auto r = cls.row(h);
    std::uint64_t wrong = 0;
    for (std::size_t x = 0; x < r.size(); ++x) wrong += r[x] ? counts.zeros[x] : counts.ones[x];
    return static_cast<double>(wrong) / static_cast<double>(counts.total);
}

double conditional_true_error(const HypothesisClass& cls, const DataModel& model,
                              std::span<const DomainIndex> region, HypothesisIndex h) {
    const double mass = region_mass(model, region);
    if (mass <= 0.0) throw Error(ErrorCode::ZeroMassRegion, "conditional error on a null region");
    auto r = cls.row(h);
    const auto w = model.weights();
    double err = 0.0;
    for (auto x : region) {
        const double p1 = model.prob_one(x);
        err += w[x] * (r[x] ? 1.0 - p1 : p1);
    }
    return err / mass;
}

std::vector<DomainIndex> disagreement_region(const HypothesisClass& cls, const VersionSpace& v) {
    if (v.empty()) throw Error(ErrorCode::EmptyVersionSpace, "disagreement region of an empty version space");
    const auto members = v.members();
    const auto ref = cls.row(members.front());
    std::vector<bool> dis(cls.domain_size(), false);
    for (std::size_t i = 1; i < members.size(); ++i) {
        auto r = cls.row(members[i]);
        for (std::size_t x = 0; x < r.size(); ++x)
            if (r[x] != ref[x]) dis[x] = true;
    }
    std::vector<DomainIndex> out;
    for (std::size_t x = 0; x < dis.size(); ++x)
        if (dis[x]) out.push_back(x);
    return out;
}

double region_mass(const DataModel& model, std::span<const DomainIndex> region) {
    const auto w = model.weights();
    double m = 0.0;
    for (auto x : region) m += w[x];
    return std::min(m, 1.0);
}

double disagreement_mass(const HypothesisClass& cls, const DataModel& model, const VersionSpace& v) {
    return region_mass(model, disagreement_region(cls, v));
}

double hypothesis_distance(const HypothesisClass& cls, const DataModel& model, HypothesisIndex a,
                           HypothesisIndex b) {
    auto ra = cls.row(a);
    auto rb = cls.row(b);
    const auto w = model.weights();
    double d = 0.0;
    for (std::size_t x = 0; x < ra.size(); ++x)
        if (ra[x] != rb[x]) d += w[x];
    return d;
}

VersionSpace error_ball(const HypothesisClass& cls, const DataModel& model, HypothesisIndex center,
                        double eps) {
    require_index(cls, center);
    VersionSpace ball(cls.size());
    for (HypothesisIndex h = 0; h < cls.size(); ++h)
        if (hypothesis_distance(cls, model, center, h) <= eps + kProbTolerance) ball.insert(h);
    return ball;
}

double disagreement_coefficient(const HypothesisClass& cls, const DataModel& model,
                                HypothesisIndex center) {
    require_index(cls, center);
    std::vector<std::pair<double, HypothesisIndex>> by_distance;
    for (HypothesisIndex h = 0; h < cls.size(); ++h)
        by_distance.emplace_back(hypothesis_distance(cls, model, center, h), h);
    std::sort(by_distance.begin(), by_distance.end());

    // Every ball contains the center, so DIS(B) is the union of the points
    // where some member differs from the center; grow it one distance step at a time.
    const auto c = cls.row(center);
    const auto w = model.weights();
    std::vector<bool> in_region(cls.domain_size(), false);
    double mass = 0.0;
    double theta = 0.0;
    std::size_t i = 0;
    while (i < by_distance.size()) {
        const double eps = by_distance[i].first;
        for (; i < by_distance.size() && by_distance[i].first <= eps + kProbTolerance; ++i) {
            auto r = cls.row(by_distance[i].second);
            for (std::size_t x = 0; x < r.size(); ++x) {
                if (r[x] != c[x] && !in_region[x]) {
                    in_region[x] = true;
                    mass += w[x];
                }
            }
        }
        if (eps > kProbTolerance) theta = std::max(theta, std::min(mass, 1.0) / eps);
    }
    return theta;
}

} // namespace rdal
