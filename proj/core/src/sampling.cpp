#include "rdal/sampling.hpp"

#include <algorithm>
#include <cmath>

#include <boost/random/binomial_distribution.hpp>
#include <boost/random/negative_binomial_distribution.hpp>

#include "rdal/errors.hpp"

namespace rdal {

std::uint64_t DataStream::binomial(std::uint64_t trials, double p) {
    if (trials == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    boost::random::binomial_distribution<std::int64_t, double> dist(static_cast<std::int64_t>(trials), p);
    return static_cast<std::uint64_t>(dist(engine_));
}

std::uint64_t DataStream::negative_binomial(std::uint64_t successes, double p) {
    if (successes == 0 || p >= 1.0) return 0;
    if (p <= 0.0) throw Error(ErrorCode::ZeroMassRegion, "negative binomial draw with zero success probability");
    boost::random::negative_binomial_distribution<std::int64_t, double> dist(
        static_cast<std::int64_t>(successes), p);
    return static_cast<std::uint64_t>(dist(engine_));
}

std::uint64_t DataStream::geometric(double p) {
    if (p >= 1.0) return 0;
    if (p <= 0.0) throw Error(ErrorCode::ZeroMassRegion, "geometric draw with zero success probability");
    const double u = 1.0 - uniform01(); // (0,1]
    return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-p)));
}

namespace {

struct Region {
    std::vector<DomainIndex> points;
    std::vector<double> cumulative; // unnormalized prefix sums of weights
    double mass = 0.0;
};

Region conditional_region(const HypothesisClass& cls, const DataModel& model, const VersionSpace& v) {
    Region r;
    r.points = disagreement_region(cls, v);
    const auto w = model.weights();
    double acc = 0.0;
    for (auto x : r.points) {
        acc += w[x];
        r.cumulative.push_back(acc);
    }
    r.mass = std::min(acc, 1.0);
    if (r.mass <= 0.0) throw Error(ErrorCode::ZeroMassRegion, "disagreement region has zero mass");
    return r;
}

DomainIndex draw_point(const std::vector<DomainIndex>& points, const std::vector<double>& cumulative,
                       DataStream& stream) {
    const double u = stream.uniform01() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    // Skip trailing zero-weight entries that share the final prefix sum.
    if (it == cumulative.end()) it = std::lower_bound(cumulative.begin(), cumulative.end(), cumulative.back());
    return points[static_cast<std::size_t>(it - cumulative.begin())];
}

void charge_rejections(double mass, std::uint64_t accepted, DataStream& stream, Counters& counters) {
    if (!counters.stream_accounting) return;
    for (std::uint64_t i = 0; i < accepted; ++i) counters.unlabeled += stream.geometric(mass);
}

} // namespace

LabeledSample sample_labeled(const HypothesisClass& cls, const DataModel& model,
                             const VersionSpace& v, std::size_t k, DataStream& stream,
                             Counters& counters, std::size_t round) {
    const Region region = conditional_region(cls, model, v);
    LabeledSample s;
    s.round = round;
    if (k == 0) return s;
    s.points.reserve(k);
    s.labels.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto x = draw_point(region.points, region.cumulative, stream);
        s.points.push_back(x);
        s.labels.push_back(stream.uniform01() < model.prob_one(x) ? 1 : 0);
    }
    counters.labels += k;
    charge_rejections(region.mass, k, stream, counters);
    return s;
}

LabelCounts sample_label_counts_in(const DataModel& model, std::span<const DomainIndex> region,
                                   std::uint64_t k, DataStream& stream, Counters& counters,
                                   std::size_t round) {
    const auto w = model.weights();
    double region_total = 0.0;
    for (auto x : region) region_total += w[x];
    if (region.empty() || region_total <= 0.0)
        throw Error(ErrorCode::ZeroMassRegion, "sampling region has zero mass");
    LabelCounts c(model.domain_size());
    c.round = round;
    if (k == 0) return c;
    std::size_t last = region.size() - 1;
    while (w[region[last]] <= 0.0) --last;
    // Multinomial by sequential conditional binomials.
    std::uint64_t remaining = k;
    double remaining_mass = region_total;
    for (std::size_t i = 0; i <= last && remaining > 0; ++i) {
        const auto x = region[i];
        const std::uint64_t n =
            i == last ? remaining : stream.binomial(remaining, std::min(1.0, w[x] / remaining_mass));
        remaining -= n;
        remaining_mass -= w[x];
        const std::uint64_t ones = stream.binomial(n, model.prob_one(x));
        c.ones[x] = ones;
        c.zeros[x] = n - ones;
    }
    c.total = k;
    counters.labels += k;
    if (counters.stream_accounting)
        counters.unlabeled += stream.negative_binomial(k, std::min(region_total, 1.0));
    return c;
}

LabelCounts sample_label_counts(const HypothesisClass& cls, const DataModel& model,
                                const VersionSpace& v, std::uint64_t k, DataStream& stream,
                                Counters& counters, std::size_t round) {
    const auto region = disagreement_region(cls, v);
    return sample_label_counts_in(model, region, k, stream, counters, round);
}

std::vector<DomainIndex> sample_unlabeled(const DataModel& model, std::size_t m, DataStream& stream,
                                          Counters& counters) {
    std::vector<DomainIndex> all(model.domain_size());
    std::vector<double> cumulative(model.domain_size());
    double acc = 0.0;
    const auto w = model.weights();
    for (std::size_t x = 0; x < w.size(); ++x) {
        all[x] = x;
        acc += w[x];
        cumulative[x] = acc;
    }
    std::vector<DomainIndex> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.push_back(draw_point(all, cumulative, stream));
    counters.unlabeled += m;
    return out;
}

std::uint64_t count_unlabeled_in_region(const DataModel& model, std::span<const DomainIndex> region,
                                        std::uint64_t m, DataStream& stream, Counters& counters) {
    counters.unlabeled += m;
    return stream.binomial(m, region_mass(model, region));
}

} // namespace rdal
