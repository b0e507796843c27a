#include "rdal/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rdal/errors.hpp"

namespace rdal {

namespace {

std::uint64_t ceil_count(double v) {
    if (!std::isfinite(v)) throw Error(ErrorCode::ParameterError, "sample size is not finite");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(v)));
}

void check_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw Error(ErrorCode::ParameterError, std::string(name) + " must lie in (0,1)");
}

HypothesisIndex empirical_minimizer(const HypothesisClass& cls, const VersionSpace& v,
                                    const LabelCounts& counts) {
    HypothesisIndex best = 0;
    double best_err = 2.0;
    for (auto h : v.members()) {
        const double e = conditional_empirical_error(cls, counts, h);
        if (e < best_err) {
            best_err = e;
            best = h;
        }
    }
    return best;
}

// Loop-guard estimate of the disagreement mass from fresh unlabeled draws,
// accurate to `tolerance` except with probability `fail`.
double estimated_mass(const DataModel& model, std::span<const DomainIndex> region, double tolerance,
                      double fail, DataStream& data, Counters& counters) {
    const auto m = ceil_count(std::log(2.0 / fail) / (2.0 * tolerance * tolerance));
    return static_cast<double>(count_unlabeled_in_region(model, region, m, data, counters)) /
           static_cast<double>(m);
}

void finish(RunResult& r, const HypothesisClass& cls, const VersionSpace& v, HypothesisIndex h,
            const Counters& counters) {
    r.hypothesis = h;
    auto row = cls.row(h);
    r.signature.assign(row.begin(), row.end());
    r.survivors = v.members();
    r.labels_used = counters.labels;
    r.unlabeled_used = counters.unlabeled;
}

} // namespace

VersionSpace cal_eliminate(const HypothesisClass& cls, const VersionSpace& v, const LabelCounts& counts) {
    VersionSpace out = v;
    for (auto h : v.members())
        if (conditional_empirical_error(cls, counts, h) > 0.0) out.erase(h);
    return out;
}

VersionSpace a2_eliminate(const HypothesisClass& cls, const VersionSpace& v, const LabelCounts& counts,
                          double radius) {
    const auto members = v.members();
    std::vector<double> errs;
    double min_upper = 2.0;
    for (auto h : members) {
        errs.push_back(conditional_empirical_error(cls, counts, h));
        min_upper = std::min(min_upper, errs.back() + radius);
    }
    VersionSpace out = v;
    for (std::size_t i = 0; i < errs.size(); ++i)
        if (errs[i] - radius > min_upper) out.erase(members[i]);
    return out;
}

std::size_t cal_round_bound(double eps) {
    check_unit(eps, "epsilon");
    return static_cast<std::size_t>(std::ceil(std::log2(2.0 / eps)));
}

std::size_t a2_round_bound(double theta, double nu, double eps) {
    if (nu <= 0.0) return cal_round_bound(eps);
    const double x = 8.0 * theta * nu;
    if (x >= 1.0) return 1;
    return 1 + static_cast<std::size_t>(std::ceil(std::log2(1.0 / x)));
}

RunResult run_passive_erm(const Problem& problem, const LearnerParams& params, DataStream& data) {
    check_unit(params.epsilon, "epsilon");
    check_unit(params.delta, "delta");
    const auto& cls = problem.cls;
    const auto m = ceil_count(params.constants.c_pass / params.epsilon *
                              std::log(static_cast<double>(cls.size()) / params.delta));
    Counters counters{.stream_accounting = params.stream_accounting};
    std::vector<DomainIndex> domain(cls.domain_size());
    std::iota(domain.begin(), domain.end(), DomainIndex{0});
    const auto counts = sample_label_counts_in(problem.model, domain, m, data, counters);

    RunResult r;
    r.algo = "erm";
    const auto all = VersionSpace::all(cls.size());
    finish(r, cls, all, empirical_minimizer(cls, all, counts), counters);
    r.survivors = {r.hypothesis};
    r.final_disagreement_estimate = disagreement_mass(cls, problem.model, all);
    return r;
}

RunResult run_cal(const Problem& problem, const LearnerParams& params, DataStream& data) {
    if (!problem.model.is_realizable())
        throw Error(ErrorCode::WrongSetting, "CAL needs a realizable label oracle");
    check_unit(params.epsilon, "epsilon");
    check_unit(params.delta, "delta");
    const auto& cls = problem.cls;
    const auto& model = problem.model;
    const std::size_t n_max = cal_round_bound(params.epsilon);
    const auto k = ceil_count(params.constants.c_cal * problem.theta *
                              std::log(static_cast<double>(cls.size() * n_max) / params.delta));
    Counters counters{.stream_accounting = params.stream_accounting};

    RunResult r;
    r.algo = "cal";
    VersionSpace v = VersionSpace::all(cls.size());
    for (;;) {
        const auto region = disagreement_region(cls, v);
        const double mass = region_mass(model, region);
        double guard = mass;
        bool proceed = mass > params.epsilon;
        if (params.stream_accounting) {
            guard = estimated_mass(model, region, params.epsilon / 2.0,
                                   params.delta / (2.0 * static_cast<double>(n_max)), data, counters);
            proceed = guard > params.epsilon / 2.0 && mass > 0.0;
        }
        r.final_disagreement_estimate = guard;
        if (!proceed) break;
        if (r.rounds >= 4 * n_max)
            throw Error(ErrorCode::RoundCapExceeded, "CAL exceeded " + std::to_string(4 * n_max) + " rounds");

        RoundRecord rec{.round = r.rounds, .delta_hat = guard, .delta_true = mass, .version_size = v.count()};
        r.last_round_members = v.members();
        const auto counts = sample_label_counts(cls, model, v, k, data, counters, r.rounds);
        v = cal_eliminate(cls, v, counts);
        if (v.empty()) throw Error(ErrorCode::EmptyVersionSpace, "CAL eliminated every hypothesis");
        rec.survivors = v.count();
        rec.labels_so_far = counters.labels;
        r.trace.push_back(rec);
        ++r.rounds;
    }
    finish(r, cls, v, v.members().front(), counters);
    return r;
}

RunResult run_a2(const Problem& problem, const LearnerParams& params, DataStream& data) {
    check_unit(params.epsilon, "epsilon");
    check_unit(params.delta, "delta");
    const auto& cls = problem.cls;
    const auto& model = problem.model;
    const double theta = problem.theta;
    const double nu = problem.nu;
    const double n_classes = static_cast<double>(cls.size());
    const std::size_t n_max = a2_round_bound(theta, nu, params.epsilon);
    const double delta_round = params.delta / static_cast<double>(n_max);
    const auto k = ceil_count(params.constants.c_a2 * theta * theta *
                              std::log(n_classes * static_cast<double>(n_max) / delta_round));
    const double radius = std::sqrt(std::log(2.0 * n_classes / delta_round) / (2.0 * static_cast<double>(k)));
    Counters counters{.stream_accounting = params.stream_accounting};

    RunResult r;
    r.algo = "a2";
    VersionSpace v = VersionSpace::all(cls.size());
    const double exit_mass = 8.0 * theta * nu;
    for (;;) {
        const auto region = disagreement_region(cls, v);
        const double mass = region_mass(model, region);
        double guard = mass;
        if (params.stream_accounting && mass > 0.0) {
            const double tol = nu > 0.0 ? std::min(0.5, 4.0 * theta * nu) : params.epsilon / 2.0;
            guard = estimated_mass(model, region, tol, delta_round / 2.0, data, counters);
        }
        r.final_disagreement_estimate = guard;
        if (mass <= 0.0) break;
        if (nu > 0.0) {
            if (guard < exit_mass) break;
            if (r.rounds >= 4 * n_max)
                throw Error(ErrorCode::RoundCapExceeded, "A2 exceeded " + std::to_string(4 * n_max) + " rounds");
        } else if (r.rounds >= n_max) {
            break;
        }

        RoundRecord rec{.round = r.rounds, .delta_hat = guard, .delta_true = mass, .version_size = v.count()};
        r.last_round_members = v.members();
        const auto counts = sample_label_counts(cls, model, v, k, data, counters, r.rounds);
        v = a2_eliminate(cls, v, counts, radius);
        if (v.empty()) throw Error(ErrorCode::EmptyVersionSpace, "A2 eliminated every hypothesis");
        rec.survivors = v.count();
        rec.labels_so_far = counters.labels;
        r.trace.push_back(rec);
        ++r.rounds;
    }

    HypothesisIndex chosen = v.members().front();
    if (disagreement_mass(cls, model, v) > 0.0) {
        const auto k_final = ceil_count(params.constants.c_a2_final * theta * theta * (nu * nu) /
                                        (params.epsilon * params.epsilon) *
                                        std::log(n_classes / params.delta));
        const auto counts = sample_label_counts(cls, model, v, k_final, data, counters, r.rounds);
        chosen = empirical_minimizer(cls, v, counts);
    }
    finish(r, cls, v, chosen, counters);
    return r;
}

} // namespace rdal
