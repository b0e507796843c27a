#include <doctest.h>

#include <cmath>

#include "rdal/errors.hpp"
#include "rdal/replicable.hpp"

using namespace rdal;

namespace {

LearnerParams params(double eps, double delta, double rho) {
    LearnerParams p;
    p.epsilon = eps;
    p.delta = delta;
    p.rho = rho;
    return p;
}

DataModel noisy(const HypothesisClass& cls, HypothesisIndex target, double eta) {
    const auto row = cls.row(target);
    return DataModel::agnostic(DataModel::uniform_weights(cls.domain_size()), {row.begin(), row.end()},
                               std::vector<double>(cls.domain_size(), eta));
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Precondition;
}

} // namespace

TEST_CASE("grid with a forced spacing") {
    Constants c;
    c.forced_spacing = 1.0 / 64;
    auto rs = RandomString::from_hex("12");
    const auto g = build_grid(2.0, 0.3, 129, GridPhase::Realizable, 0.05, 0.0, rs, c);
    CHECK(g.range_top == doctest::Approx(1.0 / 16));
    CHECK(g.count == 3);
    CHECK(g.spacing == doctest::Approx(1.0 / 64));
    CHECK(g.threshold(0) == doctest::Approx(g.v_init + 1.5 / 64));
    CHECK(g.threshold(1) == doctest::Approx(g.v_init + 2.5 / 64));
    CHECK(g.threshold(2) == doctest::Approx(g.v_init + 3.5 / 64));
    CHECK(g.v_init >= 0.0);
    CHECK(g.v_init < 2 * g.range_top);

    c.forced_spacing = 0.3 / 64;
    auto rs2 = RandomString::from_hex("12");
    CHECK(code_of([&] { build_grid(2.0, 0.3, 129, GridPhase::Realizable, 0.05, 0.0, rs2, c); }) ==
          ErrorCode::ParameterError);
}

TEST_CASE("grid determinism, phases and degenerate count") {
    const Constants c;
    auto a = RandomString::from_hex("feed");
    auto b = RandomString::from_hex("feed");
    const auto ga = build_grid(2.0, 0.3, 129, GridPhase::Realizable, 0.05, 0.0, a, c);
    const auto gb = build_grid(2.0, 0.3, 129, GridPhase::Realizable, 0.05, 0.0, b, c);
    CHECK(ga.v_init == gb.v_init);
    CHECK(ga.selected_index == gb.selected_index);
    CHECK(ga.count == static_cast<std::size_t>(std::floor(std::log(129.0) / 0.09)));
    CHECK(ga.spacing * static_cast<double>(ga.count + 1) == doctest::Approx(ga.range_top).epsilon(1e-14));

    auto s = RandomString::from_hex("1");
    const auto tiny = build_grid(2.0, 0.9, 2, GridPhase::Realizable, 0.05, 0.0, s, c);
    CHECK(tiny.count == 1);
    CHECK(tiny.selected_index == 0);

    auto n = RandomString::from_hex("1");
    CHECK(code_of([&] { build_grid(2.0, 0.3, 129, GridPhase::AgnosticLoop, 0.1, 0.0, n, c); }) ==
          ErrorCode::ParameterError);
    const auto loop = build_grid(2.0, 0.3, 129, GridPhase::AgnosticLoop, 0.1, 0.02, n, c);
    const auto fin = build_grid(2.0, 0.3, 129, GridPhase::AgnosticFinal, 0.1, 0.02, n, c, loop.selected_index);
    CHECK(loop.range_top == doctest::Approx(1.0 / 64));
    CHECK(fin.range_top == doctest::Approx(0.1 / (64 * 2 * 0.02)));
    CHECK(fin.selected_index == loop.selected_index);
    CHECK(fin.count == loop.count);
}

TEST_CASE("property: thresholds are positive and strictly inside the grid") {
    const Constants c;
    for (int i = 0; i < 200; ++i) {
        auto rs = RandomString::from_hex(std::to_string(i + 1));
        const auto g = build_grid(1.0 + i % 7, 0.1 + 0.004 * i, 2 + i, GridPhase::Realizable, 0.05, 0.0, rs, c);
        CHECK(g.selected_index < g.count);
        for (std::size_t j = 0; j < g.count; ++j) {
            CHECK(g.threshold(j) > 0.0);
            CHECK(g.threshold(j) > g.v_init);
            CHECK(g.threshold(j) < g.v_init + g.range_top);
        }
    }
}

TEST_CASE("schedule closed forms") {
    const Constants c;
    const double theta = 2, eps = 0.05, delta = 0.01, rho = 0.1;
    const auto s = size_schedule(theta, eps, delta, rho, 0.0, 129, Setting::Realizable, c);
    const double n = std::ceil(std::log2(2 / eps));
    const double m = std::floor(std::log(129.0) / (rho * rho));
    const double spacing = (1 / (8 * theta)) / (m + 1);
    CHECK(s.n_max == 6);
    CHECK(s.spacing == doctest::Approx(spacing));
    const double k_err = std::ceil(2 * theta * std::log(129 * n / delta));
    const double k_rep = std::ceil(std::log(n / rho) / (theta * spacing * spacing));
    CHECK(static_cast<double>(s.k) == std::max(k_err, k_rep));
    const double r = rho / 12, d = delta / 12, beta = r - 2 * d, tau = eps / 2;
    const double t_req = std::ceil((1 + beta) * (1 + beta) * std::log(2 / d) / (2 * tau * tau * beta * beta));
    CHECK(static_cast<double>(s.t) == std::ceil(2 * t_req));

    CHECK(size_schedule(theta, eps / 2, delta, rho, 0.0, 129, Setting::Realizable, c).n_max == s.n_max + 1);
    const auto again = size_schedule(theta, eps, delta, rho, 0.0, 129, Setting::Realizable, c);
    CHECK(again.k == s.k);
    CHECK(again.t == s.t);
    CHECK(code_of([&] { size_schedule(theta, eps, 0.1, 0.1, 0.0, 129, Setting::Realizable, c); }) ==
          ErrorCode::ParameterError);
}

TEST_CASE("agnostic schedule") {
    const Constants c;
    const double theta = 2, eps = 0.1, delta = 0.1, rho = 0.3, nu = 0.02;
    const auto s = size_schedule(theta, eps, delta, rho, nu, 129, Setting::Agnostic, c);
    const double n = std::ceil(std::log2(1 / (8 * theta * nu))) + 1;
    CHECK(static_cast<double>(s.n_max) == n);
    CHECK_FALSE(s.loop_guard_unsatisfiable);
    const double m = std::floor(std::log(129.0) / (rho * rho));
    const double sp = (1 / (32 * theta)) / (m + 1);
    const double sp_final = (eps / (64 * theta * nu)) / (m + 1);
    CHECK(s.k == static_cast<std::uint64_t>(std::max(std::ceil(2 * theta * theta * std::log(129 * n / delta)),
                                                     std::ceil(std::log(n / rho) / (sp * sp)))));
    CHECK(s.k_final ==
          static_cast<std::uint64_t>(std::max(std::ceil(theta * theta * nu * nu / (eps * eps) * std::log(129 / delta)),
                                              std::ceil(std::log(n / rho) / (sp_final * sp_final)))));
    CHECK(s.loop_query.tau == doctest::Approx(8 * theta * nu));
    CHECK(s.final_query.rho == doctest::Approx(rho / (2 * (n + 1))));
    CHECK(size_schedule(theta, eps, delta, rho, 0.05, 129, Setting::Agnostic, c).loop_guard_unsatisfiable);
}

TEST_CASE("RepliCAL on a single hypothesis") {
    const HypothesisClass one(4, {{1, 1, 0, 0}});
    const auto model = DataModel::realizable(one, DataModel::uniform_weights(4), 0);
    const auto p = make_problem(one, model);
    DataStream data(1);
    const auto r = run_replical(p, params(0.05, 0.05, 0.3), RandomString::from_hex("1"), data);
    CHECK(r.labels_used == 0);
    CHECK(r.hypothesis == 0);
    CHECK(r.rounds == 0);
}

TEST_CASE("RepliCAL runs: target survival, monotone version space, exit soundness") {
    const auto cls = HypothesisClass::thresholds(32);
    const auto model = DataModel::realizable(cls, DataModel::uniform_weights(32), 11);
    const auto p = make_problem(cls, model);
    int sound = 0;
    const int runs = 60;
    for (int i = 0; i < runs; ++i) {
        DataStream data(i);
        const auto r = run_replical(p, params(0.05, 0.05, 0.3), RandomString::from_hex(std::to_string(100 + i)), data);
        bool target_in = false;
        for (auto h : r.survivors) target_in |= h == 11;
        CHECK(target_in);
        for (std::size_t j = 0; j < r.trace.size(); ++j) {
            CHECK(r.trace[j].survivors <= r.trace[j].version_size);
            if (j > 0) CHECK(r.trace[j].version_size == r.trace[j - 1].survivors);
        }
        sound += disagreement_mass(cls, model, VersionSpace::of(cls.size(), r.survivors)) <= 0.05;
    }
    CHECK(sound >= 0.95 * runs);
}

TEST_CASE("data seeds never move b-derived choices") {
    const auto cls = HypothesisClass::thresholds(32);
    const auto model = DataModel::realizable(cls, DataModel::uniform_weights(32), 11);
    const auto p = make_problem(cls, model);
    DataStream d1(1), d2(2), d1b(1);
    const auto b = RandomString::from_hex("abcdef");
    const auto r1 = run_replical(p, params(0.05, 0.05, 0.3), b, d1);
    const auto r2 = run_replical(p, params(0.05, 0.05, 0.3), b, d2);
    const auto r1b = run_replical(p, params(0.05, 0.05, 0.3), b, d1b);
    CHECK(r1.grid->v_init == r2.grid->v_init);
    CHECK(r1.grid->selected_index == r2.grid->selected_index);
    CHECK(r1.labels_used == r1b.labels_used);
    CHECK(r1.unlabeled_used == r1b.unlabeled_used);
    CHECK(r1.signature == r1b.signature);
    CHECK(r1.trace.size() == r1b.trace.size());
}

TEST_CASE("final selection is a function of the survivor set and b") {
    const auto cls = HypothesisClass::thresholds(16);
    const std::vector<HypothesisIndex> a{3, 4, 5, 9};
    const std::vector<HypothesisIndex> b{9, 5, 4, 3};
    auto r1 = RandomString::from_hex("31");
    auto r2 = RandomString::from_hex("31");
    CHECK(select_final(cls, VersionSpace::of(cls.size(), a), r1) ==
          select_final(cls, VersionSpace::of(cls.size(), b), r2));
    const std::vector<HypothesisIndex> one{7};
    auto r3 = RandomString::from_hex("31");
    CHECK(select_final(cls, VersionSpace::of(cls.size(), one), r3) == 7);
    // Duplicate rows resolve to the lowest surviving index.
    const HypothesisClass dup(2, {{0, 1}, {1, 1}, {0, 1}});
    const std::vector<HypothesisIndex> pair{0, 2};
    auto r4 = RandomString::from_hex("5");
    CHECK(select_final(dup, VersionSpace::of(3, pair), r4) == 0);
}

TEST_CASE("ReplicA2 rejects nu = 0 and records sigma") {
    const auto cls = HypothesisClass::thresholds(32);
    const auto clean = DataModel::realizable(cls, DataModel::uniform_weights(32), 16);
    DataStream data(1);
    const auto p0 = make_problem(cls, clean);
    CHECK(code_of([&] { run_replica2(p0, params(0.1, 0.1, 0.3), RandomString::from_hex("1"), data); }) ==
          ErrorCode::ParameterError);

    const auto model = noisy(cls, 16, 0.02);
    const auto p = make_problem(cls, model);
    int kept = 0;
    for (int i = 0; i < 20; ++i) {
        DataStream d(i);
        const auto r = run_replica2(p, params(0.1, 0.1, 0.3), RandomString::from_hex(std::to_string(i + 1)), d);
        CHECK_FALSE(r.has_flag("loop_guard_unsatisfiable"));
        for (const auto& rec : r.trace)
            if (rec.delta_hat > 0) CHECK(rec.sigma >= 2 * p.nu / rec.delta_hat);
        bool in = false;
        for (auto h : r.survivors) in |= h == p.best;
        kept += in;
    }
    CHECK(kept >= 18);

    const auto loud = noisy(cls, 16, 0.05);
    const auto pl = make_problem(cls, loud);
    DataStream d(3);
    CHECK(run_replica2(pl, params(0.1, 0.1, 0.3), RandomString::from_hex("2"), d).has_flag("loop_guard_unsatisfiable"));
}
