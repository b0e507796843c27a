#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "rdal/errors.hpp"
#include "rdal/rstat.hpp"
#include "rdal/shared_randomness.hpp"

using namespace rdal;

TEST_CASE("required sample size closed form") {
    CHECK(required_sample_size({0.1, 0.1, 0.01}) == 48281);
    const double raw = 1.08 * 1.08 * std::log(200.0) / (2 * 0.01 * 0.0064);
    CHECK(required_sample_size({0.1, 0.1, 0.01}) == static_cast<std::uint64_t>(std::ceil(raw)));
    const auto k1 = required_sample_size({0.2, 0.05, 0.01});
    const auto k2 = required_sample_size({0.2, 0.1, 0.01});
    CHECK(std::abs(static_cast<double>(k1) / 4.0 - static_cast<double>(k2)) <= 1.0);
    CHECK_THROWS_AS(required_sample_size({0.2, 0.1, 0.1}), Error);
    CHECK_THROWS_AS(required_sample_size({0.2, 0.0, 0.01}), Error);
}

TEST_CASE("grid construction") {
    const SQParams p{0.2, 0.1, 0.01};
    const auto g = rounding_grid(p, 0.5);
    const double beta = 0.18;
    CHECK(g.radius == doctest::Approx(0.1 * beta / (1 + beta)));
    CHECK(g.spacing == doctest::Approx(2 * (0.1 - g.radius)));
    CHECK(g.offset == doctest::Approx(0.5 * g.spacing));
}

TEST_CASE("degenerate samples land within half a spacing") {
    const SQParams p{0.2, 0.1, 0.01};
    const auto k = required_sample_size(p);
    auto rs = RandomString::from_hex("1234");
    const auto g = rounding_grid(p, 0.0);
    for (int rep = 0; rep < 20; ++rep) {
        const double one = rstat_answer(p, std::vector<double>(k, 1.0), rs, "ones");
        const double zero = rstat_answer(p, std::vector<double>(k, 0.0), rs, "zeros");
        CHECK(std::abs(one - 1.0) <= g.spacing / 2 + 1e-12);
        CHECK(std::abs(zero) <= g.spacing / 2 + 1e-12);
    }
}

TEST_CASE("input validation") {
    const SQParams p{0.2, 0.1, 0.01};
    auto rs = RandomString::from_hex("1");
    CHECK_THROWS_AS(rstat_answer(p, std::vector<double>(10, 0.5), rs, "x"), Error);
    std::vector<double> bad(required_sample_size(p), 0.5);
    bad[3] = 1.5;
    try {
        rstat_answer(p, bad, rs, "x");
        FAIL("expected InputError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InputError);
    }
    CHECK_THROWS_AS(rstat_answer_counts(p, 5, 4, rs, "x"), Error);
}

TEST_CASE("property: answers sit on the offset grid within half a spacing of the mean") {
    const SQParams p{0.3, 0.05, 0.05};
    const auto k = required_sample_size(p);
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int rep = 0; rep < 200; ++rep) {
        const auto ones = static_cast<std::uint64_t>(u(g) * static_cast<double>(k));
        const double mean = static_cast<double>(ones) / static_cast<double>(k);
        auto rs = RandomString::from_hex("ab");
        rs.derive_uniform("skip");
        const std::string label = "r" + std::to_string(rep);
        const double offset_unit = RandomString::from_hex("ab").word_at(label, 0) >> 11;
        const auto grid = rounding_grid(p, offset_unit * 0x1.0p-53);
        const double a = rstat_answer_counts(p, ones, k, rs, label);
        const double cell = (a - grid.offset) / grid.spacing;
        const bool clamped = a == 0.0 || a == 1.0;
        CHECK((clamped || std::abs(cell - std::round(cell)) < 1e-9));
        CHECK(std::abs(a - mean) <= grid.spacing / 2 + 1e-12);
    }
}

TEST_CASE("exhaustive rounding oracle matches Monte Carlo at k = 4") {
    const int k = 4;
    const double p = 0.5;
    const double s = 0.3;
    const double exact = oracle::rounding_agreement(k, p, s);
    std::mt19937_64 data(21);
    std::binomial_distribution<int> draw(k, p);
    auto rs = RandomString::from_hex("4444");
    const int n = 200000;
    int agree = 0;
    for (int i = 0; i < n; ++i) {
        const RoundingGrid g{0.0, s, rs.derive_uniform("offset") * s};
        agree += round_to_grid(g, draw(data) / double(k)) == round_to_grid(g, draw(data) / double(k));
    }
    CHECK(std::abs(static_cast<double>(agree) / n - exact) < 0.01);
    // Wider spacing never lowers the exact agreement probability.
    double prev = 0;
    for (double sp = 0.05; sp < 1.0; sp += 0.05) {
        const double a = oracle::rounding_agreement(k, p, sp);
        CHECK(a >= prev - 1e-15);
        prev = a;
    }
}

TEST_CASE("property: tolerance holds at the required sample size") {
    const SQParams p{0.2, 0.1, 0.01};
    const auto k = required_sample_size(p);
    std::mt19937_64 data(8);
    std::binomial_distribution<std::uint64_t> draw(k, 0.37);
    auto rs = RandomString::from_hex("77aa");
    int ok = 0;
    const int trials = 2000;
    for (int i = 0; i < trials; ++i)
        ok += std::abs(rstat_answer_counts(p, draw(data), k, rs, "tol") - 0.37) <= p.tau;
    CHECK(ok >= 0.99 * trials);
}
