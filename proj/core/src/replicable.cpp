#include "rdal/replicable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

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

// Intervals in the grid (count + 1) and the spacing that divides the range exactly.
std::pair<std::size_t, double> grid_shape(double range_top, double rho, std::size_t class_size,
                                          const Constants& c) {
    if (c.forced_spacing) {
        const double s = *c.forced_spacing;
        if (!(s > 0.0)) throw Error(ErrorCode::ParameterError, "forced spacing must be positive");
        const double ratio = range_top / s;
        const double intervals = std::round(ratio);
        if (std::abs(ratio - intervals) > 1e-9 * ratio || intervals < 2.0)
            throw Error(ErrorCode::ParameterError, "forced spacing must divide the threshold range into at least two intervals");
        const auto count = static_cast<std::size_t>(intervals) - 1;
        return {count, range_top / intervals};
    }
    const auto count = grid_interval_count(rho, class_size, c);
    return {count, range_top / static_cast<double>(count + 1)};
}

struct RunState {
    const Problem& problem;
    RandomString& rs;
    DataStream& data;
    Counters counters;
    VersionSpace v;

    double estimate_mass(const SQParams& q, std::uint64_t t, std::string_view label) {
        const auto region = disagreement_region(problem.cls, v);
        const auto ones = count_unlabeled_in_region(problem.model, region, t, data, counters);
        return rstat_answer_counts(q, ones, t, rs, label);
    }

    // Keeps members whose conditional empirical error is at most `cutoff`.
    void threshold_update(RunResult& r, std::uint64_t k, double cutoff, RoundRecord rec) {
        const auto& cls = problem.cls;
        rec.delta_true = disagreement_mass(cls, problem.model, v);
        rec.version_size = v.count();
        r.last_round_members = v.members();
        const auto counts = sample_label_counts(cls, problem.model, v, k, data, counters, r.rounds);
        for (auto h : r.last_round_members)
            if (conditional_empirical_error(cls, counts, h) > cutoff) v.erase(h);
        if (v.empty())
            throw Error(ErrorCode::EmptyVersionSpace,
                        "threshold " + std::to_string(cutoff) + " removed every hypothesis in round " +
                            std::to_string(r.rounds));
        rec.survivors = v.count();
        rec.labels_so_far = counters.labels;
        r.trace.push_back(rec);
        ++r.rounds;
    }

    RunResult finish(RunResult r) {
        const auto h = select_final(problem.cls, v, rs);
        r.hypothesis = h;
        auto row = problem.cls.row(h);
        r.signature.assign(row.begin(), row.end());
        r.survivors = v.members();
        r.labels_used = counters.labels;
        r.unlabeled_used = counters.unlabeled;
        return r;
    }
};

// Theta = 0 means every hypothesis agrees with h* wherever D has mass, so no
// label is ever requested; any positive value sizes the unused schedule.
double usable_theta(const Problem& p, RunResult& r) {
    if (p.theta > 0.0) return p.theta;
    r.flags.emplace_back("theta_zero");
    return 1.0;
}

} // namespace

double grid_range_top(GridPhase phase, double theta, double eps, double nu) {
    if (!(theta > 0.0)) throw Error(ErrorCode::ParameterError, "threshold grid needs theta > 0");
    switch (phase) {
    case GridPhase::Realizable: return 1.0 / (8.0 * theta);
    case GridPhase::AgnosticLoop:
        if (!(nu > 0.0)) throw Error(ErrorCode::ParameterError, "agnostic grids need nu > 0");
        return 1.0 / (32.0 * theta);
    case GridPhase::AgnosticFinal:
        if (!(nu > 0.0)) throw Error(ErrorCode::ParameterError, "agnostic grids need nu > 0");
        return eps / (64.0 * theta * nu);
    }
    return 0.0;
}

std::size_t grid_interval_count(double rho, std::size_t class_size, const Constants& c) {
    const double m = std::floor(c.c_grid * std::log(static_cast<double>(class_size)) / (rho * rho));
    return m < 1.0 ? 1 : static_cast<std::size_t>(m);
}

ThresholdGrid build_grid(double theta, double rho, std::size_t class_size, GridPhase phase,
                         double eps, double nu, RandomString& rs, const Constants& c,
                         std::optional<std::size_t> reuse_index) {
    check_unit(rho, "rho");
    ThresholdGrid g;
    g.range_top = grid_range_top(phase, theta, eps, nu);
    std::tie(g.count, g.spacing) = grid_shape(g.range_top, rho, class_size, c);
    const auto start_label =
        phase == GridPhase::AgnosticFinal ? streams::kThresholdStartFinal : streams::kThresholdStart;
    g.v_init = rs.derive_uniform(start_label) * 2.0 * g.range_top;
    if (reuse_index) {
        if (*reuse_index >= g.count)
            throw Error(ErrorCode::ParameterError, "reused grid index exceeds the final grid");
        g.selected_index = *reuse_index;
    } else {
        g.selected_index = rs.derive_choice(streams::kThresholdIndex, g.count);
    }
    return g;
}

ScheduleParams size_schedule(double theta, double eps, double delta, double rho, double nu,
                             std::size_t class_size, Setting setting, const Constants& c) {
    check_unit(eps, "epsilon");
    check_unit(delta, "delta");
    check_unit(rho, "rho");
    if (!(rho > 2.0 * delta)) throw Error(ErrorCode::ParameterError, "replicable learners need rho > 2 delta");
    if (c.c_T < 1.0) throw Error(ErrorCode::ParameterError, "c_T below 1 undersizes the rSTAT sample");
    const double log_c = std::log(static_cast<double>(class_size));
    ScheduleParams s;
    if (setting == Setting::Realizable) {
        const double n = std::ceil(std::log2(2.0 / eps));
        s.n_max = static_cast<std::size_t>(n);
        s.spacing = grid_shape(grid_range_top(GridPhase::Realizable, theta, eps, nu), rho, class_size, c).second;
        const auto k_err = ceil_count(c.c_k1 * theta * (log_c + std::log(n / delta)));
        const auto k_rep = ceil_count(c.c_k2 * std::log(n / rho) / (theta * s.spacing * s.spacing));
        s.k = std::max(k_err, k_rep);
        s.loop_query = SQParams{rho / (2.0 * n), eps / 2.0, delta / (2.0 * n)};
        s.t = ceil_count(c.c_T * static_cast<double>(required_sample_size(s.loop_query)));
        return s;
    }

    if (!(nu > 0.0)) throw Error(ErrorCode::ParameterError, "ReplicA2 needs nu > 0");
    const double loop_exit = 8.0 * theta * nu;
    const double n = loop_exit >= 1.0 ? 1.0 : std::ceil(std::log2(1.0 / loop_exit)) + 1.0;
    s.n_max = static_cast<std::size_t>(n);
    s.loop_guard_unsatisfiable = 2.0 * loop_exit >= 1.0;
    s.spacing = grid_shape(grid_range_top(GridPhase::AgnosticLoop, theta, eps, nu), rho, class_size, c).second;
    s.final_spacing =
        grid_shape(grid_range_top(GridPhase::AgnosticFinal, theta, eps, nu), rho, class_size, c).second;
    const auto k_err = ceil_count(c.c_k1 * theta * theta * (log_c + std::log(n / delta)));
    const auto k_rep = ceil_count(c.c_k2 * std::log(n / rho) / (s.spacing * s.spacing));
    s.k = std::max(k_err, k_rep);
    const auto k_final_err = ceil_count(c.c_k3 * theta * theta * (nu * nu) / (eps * eps) * (log_c - std::log(delta)));
    const auto k_final_rep = ceil_count(c.c_k2 * std::log(n / rho) / (s.final_spacing * s.final_spacing));
    s.k_final = std::max(k_final_err, k_final_rep);
    const double split = 2.0 * (n + 1.0);
    if (!s.loop_guard_unsatisfiable) {
        s.loop_query = SQParams{rho / split, loop_exit, delta / split};
        s.t = ceil_count(c.c_T * static_cast<double>(required_sample_size(s.loop_query)));
    } else {
        s.t = 0;
    }
    s.final_query = SQParams{rho / split, eps / 2.0, delta / split};
    s.t_final = ceil_count(c.c_T * static_cast<double>(required_sample_size(s.final_query)));
    return s;
}

HypothesisIndex select_final(const HypothesisClass& cls, const VersionSpace& survivors, RandomString& rs) {
    if (survivors.empty()) throw Error(ErrorCode::EmptyVersionSpace, "no hypothesis to return");
    // Canonical list of the class' distinct signatures, each mapped to its
    // lowest-index survivor (if any survives).
    std::map<std::vector<Label>, std::optional<HypothesisIndex>> by_signature;
    for (HypothesisIndex h = 0; h < cls.size(); ++h) {
        auto row = cls.row(h);
        auto& slot = by_signature[std::vector<Label>(row.begin(), row.end())];
        if (!slot && survivors.contains(h)) slot = h;
    }
    std::vector<std::optional<HypothesisIndex>> canonical;
    canonical.reserve(by_signature.size());
    for (auto& [sig, h] : by_signature) canonical.push_back(h);
    for (auto i : rs.derive_permutation(streams::kFinalOrder, canonical.size()))
        if (canonical[i]) return *canonical[i];
    throw Error(ErrorCode::EmptyVersionSpace, "no hypothesis to return");
}

RunResult run_replical(const Problem& problem, const LearnerParams& params, RandomString rs,
                       DataStream& data) {
    RunResult r;
    r.algo = "replical";
    const double theta = usable_theta(problem, r);
    const auto& cls = problem.cls;
    const double eps = params.epsilon;
    const auto sched =
        size_schedule(theta, eps, params.delta, params.rho, 0.0, cls.size(), Setting::Realizable, params.constants);
    const auto grid = build_grid(theta, params.rho, cls.size(), GridPhase::Realizable, eps, 0.0, rs, params.constants);
    r.grid = grid;
    const double threshold = grid.selected();

    RunState st{problem, rs, data, Counters{.stream_accounting = params.stream_accounting},
                VersionSpace::all(cls.size())};
    double estimate = st.estimate_mass(sched.loop_query, sched.t, streams::rstat_round(0));
    while (estimate >= eps / 2.0) {
        if (r.rounds >= 4 * sched.n_max)
            throw Error(ErrorCode::RoundCapExceeded,
                        "RepliCAL exceeded " + std::to_string(4 * sched.n_max) + " rounds");
        st.threshold_update(r, sched.k, threshold,
                            RoundRecord{.round = r.rounds, .delta_hat = estimate, .threshold = threshold});
        estimate = st.estimate_mass(sched.loop_query, sched.t, streams::rstat_round(r.rounds));
    }
    r.final_disagreement_estimate = estimate;
    return st.finish(std::move(r));
}

RunResult run_replica2(const Problem& problem, const LearnerParams& params, RandomString rs,
                       DataStream& data) {
    RunResult r;
    r.algo = "replica2";
    const double nu = problem.nu;
    if (!(nu > 0.0)) throw Error(ErrorCode::ParameterError, "ReplicA2 needs a noise rate nu > 0");
    const double theta = usable_theta(problem, r);
    const auto& cls = problem.cls;
    const double eps = params.epsilon;
    const auto sched =
        size_schedule(theta, eps, params.delta, params.rho, nu, cls.size(), Setting::Agnostic, params.constants);
    const auto loop_grid =
        build_grid(theta, params.rho, cls.size(), GridPhase::AgnosticLoop, eps, nu, rs, params.constants);
    r.grid = loop_grid;

    RunState st{problem, rs, data, Counters{.stream_accounting = params.stream_accounting},
                VersionSpace::all(cls.size())};
    if (sched.loop_guard_unsatisfiable) {
        r.flags.emplace_back("loop_guard_unsatisfiable");
    } else {
        const double threshold = loop_grid.selected();
        const double guard = 16.0 * theta * nu;
        double estimate = st.estimate_mass(sched.loop_query, sched.t, streams::rstat_round(0));
        while (estimate >= guard) {
            if (r.rounds >= 4 * sched.n_max)
                throw Error(ErrorCode::RoundCapExceeded,
                            "ReplicA2 exceeded " + std::to_string(4 * sched.n_max) + " rounds");
            const double sigma = 2.0 * nu / estimate + 1.0 / (16.0 * theta);
            st.threshold_update(r, sched.k, threshold + sigma,
                                RoundRecord{.round = r.rounds, .delta_hat = estimate, .threshold = threshold,
                                            .sigma = sigma});
            estimate = st.estimate_mass(sched.loop_query, sched.t, streams::rstat_round(r.rounds));
        }
    }

    const auto final_grid = build_grid(theta, params.rho, cls.size(), GridPhase::AgnosticFinal, eps, nu, rs,
                                       params.constants, loop_grid.selected_index);
    r.final_grid = final_grid;
    const double threshold = final_grid.selected();
    const double estimate = st.estimate_mass(sched.final_query, sched.t_final, "rstat_final");
    r.final_disagreement_estimate = estimate;
    const double sigma = estimate > 0.0 ? 2.0 * nu / estimate + eps / (16.0 * theta * nu)
                                        : std::numeric_limits<double>::infinity();
    r.last_round_sigma = sigma;
    if (disagreement_mass(cls, problem.model, st.v) > 0.0) {
        st.threshold_update(r, sched.k_final, threshold + sigma,
                            RoundRecord{.round = r.rounds, .delta_hat = estimate, .threshold = threshold,
                                        .sigma = sigma});
    }
    return st.finish(std::move(r));
}

} // namespace rdal
