#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rdal/errors.hpp"
#include "rdal/shared_randomness.hpp"

using namespace rdal;

namespace {

RandomString::Seed reference_key() {
    RandomString::Seed k{};
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<std::uint8_t>(i);
    return k;
}

} // namespace

TEST_CASE("keyed hash reproduces the SipHash-2-4 reference vectors") {
    const auto key = reference_key();
    CHECK(keyed_hash64(key, "") == 0x726fdb47dd0e0e31ULL);
    std::string msg;
    for (char c = 0; c < 15; ++c) msg.push_back(c);
    CHECK(keyed_hash64(key, msg) == 0xa129ca6149be45e5ULL);
}

TEST_CASE("seed parsing") {
    CHECK(RandomString::from_hex("0x1f").hex() == "0000000000000000000000000000001f");
    CHECK(RandomString::from_hex("000102030405060708090a0b0c0d0e0f").seed() == reference_key());
    CHECK_THROWS_AS(RandomString::from_hex("xyz"), Error);
    CHECK_THROWS_AS(RandomString::from_hex(std::string(33, '1')), Error);
    CHECK_THROWS_AS(RandomString::from_hex(""), Error);
}

TEST_CASE("frozen stream values") {
    // Words are SipHash(seed, label || 0x00 || LE64(counter)); freezing them pins the layout.
    const RandomString rs(reference_key());
    std::string msg = "v_init";
    msg.push_back('\0');
    for (int i = 0; i < 8; ++i) msg.push_back(i == 0 ? 3 : 0);
    CHECK(rs.word_at("v_init", 3) == keyed_hash64(reference_key(), msg));
    RandomString a(reference_key());
    const double u = a.derive_uniform("v_init");
    CHECK(u == static_cast<double>(rs.word_at("v_init", 0) >> 11) * 0x1.0p-53);
    CHECK(a.counter("v_init") == 1);
    CHECK(a.counter("v_index") == 0);
}

TEST_CASE("determinism per label and counter") {
    auto a = RandomString::from_hex("abc");
    auto b = RandomString::from_hex("abc");
    for (int i = 0; i < 100; ++i) CHECK(a.derive_uniform("x") == b.derive_uniform("x"));
    // Interleaving other labels does not shift a stream.
    auto c = RandomString::from_hex("abc");
    auto d = RandomString::from_hex("abc");
    c.derive_uniform("other");
    c.derive_choice("another", 7);
    CHECK(c.derive_uniform("x") == d.derive_uniform("x"));
    CHECK(a.derive_permutation("p", 10) == b.derive_permutation("p", 10));
    CHECK(RandomString::from_hex("1").derive_child("trial", 4) == RandomString::from_hex("1").derive_child("trial", 4));
    CHECK_FALSE(RandomString::from_hex("1").derive_child("trial", 4) == RandomString::from_hex("1").derive_child("trial", 5));
}

TEST_CASE("uniform draws pass a KS test") {
    auto rs = RandomString::from_hex("5eed");
    const int n = 100000;
    std::vector<double> v(n);
    for (auto& x : v) x = rs.derive_uniform("ks");
    std::sort(v.begin(), v.end());
    double d = 0;
    for (int i = 0; i < n; ++i) d = std::max({d, (i + 1.0) / n - v[i], v[i] - static_cast<double>(i) / n});
    // Critical value at alpha = 0.01.
    CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
    CHECK(v.front() >= 0.0);
    CHECK(v.back() < 1.0);
}

TEST_CASE("distinct labels are decorrelated") {
    auto rs = RandomString::from_hex("c0ffee");
    const int n = 100000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rs.derive_uniform("left");
        const double y = rs.derive_uniform("right");
        sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double r = cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) * (syy / n - (sy / n) * (sy / n)));
    CHECK(std::abs(r) < 0.02);
}

TEST_CASE("choice is uniform") {
    auto rs = RandomString::from_hex("77");
    CHECK(rs.derive_choice("one", 1) == 0);
    CHECK_THROWS_AS(rs.derive_choice("none", 0), Error);
    const int n = 100000;
    std::vector<int> hist(7, 0);
    for (int i = 0; i < n; ++i) ++hist[rs.derive_choice("chi", 7)];
    double chi2 = 0;
    for (int c : hist) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    // 6 degrees of freedom, alpha = 0.001.
    CHECK(chi2 < 22.46);
}

TEST_CASE("permutations of three are equiprobable") {
    auto rs = RandomString::from_hex("99");
    CHECK(rs.derive_permutation("single", 1) == std::vector<std::size_t>{0});
    const int n = 60000;
    std::map<std::vector<std::size_t>, int> hist;
    for (int i = 0; i < n; ++i) ++hist[rs.derive_permutation("perm", 3)];
    CHECK(hist.size() == 6);
    const double p = 1.0 / 6, sigma = std::sqrt(n * p * (1 - p));
    for (auto& [perm, c] : hist) CHECK(std::abs(c - n * p) < 3 * sigma);
}
