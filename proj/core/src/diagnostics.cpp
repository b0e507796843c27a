#include "rdal/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "rdal/errors.hpp"

namespace rdal {

IntervalProfile make_profile(const ThresholdGrid& grid, std::vector<double> reference_errors) {
    if (!(grid.spacing > 0.0)) throw Error(ErrorCode::InputError, "profile grid needs a positive spacing");
    IntervalProfile p;
    p.grid = grid;
    p.counts.assign(grid.count + 1, 0);
    for (double e : reference_errors) {
        const double pos = std::floor((e - grid.v_init) / grid.spacing);
        if (pos < 1.0) {
            ++p.counts[0];
        } else if (pos > static_cast<double>(grid.count)) {
            ++p.overflow;
        } else {
            ++p.counts[static_cast<std::size_t>(pos)];
        }
    }
    p.cumulative.resize(p.counts.size());
    std::size_t run = 0;
    for (std::size_t i = 0; i < p.counts.size(); ++i) p.cumulative[i] = run += p.counts[i];
    p.reference_errors = std::move(reference_errors);
    return p;
}

std::vector<double> conditional_reference_errors(const HypothesisClass& cls, const DataModel& model,
                                                 std::span<const HypothesisIndex> members, double sigma) {
    const auto v = VersionSpace::of(cls.size(), members);
    const auto region = disagreement_region(cls, v);
    std::vector<double> out;
    out.reserve(members.size());
    const bool degenerate = region_mass(model, region) <= 0.0;
    for (auto h : members) out.push_back((degenerate ? 0.0 : conditional_true_error(cls, model, region, h)) - sigma);
    return out;
}

std::vector<bool> classify_thresholds(const IntervalProfile& profile, double rho) {
    const auto& n = profile.counts;
    const auto& cum = profile.cumulative;
    std::vector<bool> bad(n.size(), false);
    for (std::size_t i = 1; i < n.size(); ++i) {
        const double below = static_cast<double>(cum[i - 1]);
        bool flag = static_cast<double>(n[i]) > rho / 30.0 * below;
        for (std::size_t j = 1; !flag && i + j < n.size(); ++j)
            flag = static_cast<double>(n[i + j]) >= std::exp(static_cast<double>(j)) * below;
        bad[i] = flag;
    }
    return bad;
}

double bad_fraction(const IntervalProfile& profile, double rho) {
    const auto flags = classify_thresholds(profile, rho);
    if (flags.size() < 2) return 0.0;
    const auto bad = std::count(flags.begin() + 1, flags.end(), true);
    return static_cast<double>(bad) / static_cast<double>(flags.size() - 1);
}

Divergence set_divergence(const PairedSets& sets) {
    auto a = sets.first;
    auto b = sets.second;
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    std::vector<std::vector<Label>> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    const std::size_t uni = a.size() + b.size() - both.size();
    if (uni == 0) return Divergence{0.0, true};
    return Divergence{static_cast<double>(uni - both.size()) / static_cast<double>(uni), false};
}

IntervalProfile run_profile(const Problem& problem, const RunResult& result) {
    const ThresholdGrid* grid = result.grid ? &*result.grid : nullptr;
    double sigma = 0.0;
    std::vector<HypothesisIndex> members = result.last_round_members;
    if (!result.trace.empty()) {
        const auto& last = result.trace.back();
        if (result.final_grid && last.threshold == result.final_grid->selected()) grid = &*result.final_grid;
        if (std::isfinite(last.sigma)) sigma = last.sigma;
    } else {
        members = VersionSpace::all(problem.cls.size()).members();
    }
    if (grid == nullptr) throw Error(ErrorCode::InputError, "run carries no threshold grid");
    return make_profile(*grid, conditional_reference_errors(problem.cls, problem.model, members, sigma));
}

PairedSets survivor_sets(const HypothesisClass& cls, const RunResult& a, const RunResult& b) {
    auto collect = [&](const RunResult& r) {
        std::vector<std::vector<Label>> out;
        for (auto h : r.survivors) {
            auto row = cls.row(h);
            out.emplace_back(row.begin(), row.end());
        }
        return out;
    };
    return PairedSets{collect(a), collect(b)};
}

} // namespace rdal
