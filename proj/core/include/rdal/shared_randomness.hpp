#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rdal {

// The shared random string b. Every draw is a keyed hash of
// (seed, stream label, per-label counter), so two runs holding equal seeds see
// the same values at each call site no matter how other call sites are used.
//
// Frozen algorithm:
//   word(label, n) = SipHash-2-4(key = seed, msg = label || 0x00 || LE64(n)),
//                    read as a little-endian 64-bit integer
//   uniform        = (word >> 11) * 2^-53
//   choice(n)      = word % n, redrawing while word >= 2^64 - (2^64 mod n)
//   permutation(n) = Fisher-Yates, i = n-1 .. 1, swap(p[i], p[choice(i+1)])
class RandomString {
public:
    static constexpr std::size_t kSeedBytes = 16;
    using Seed = std::array<std::uint8_t, kSeedBytes>;

    RandomString() : seed_{} {}
    explicit RandomString(const Seed& seed) : seed_(seed) {}

    // Up to 32 hex digits, right-aligned (shorter strings are zero-padded on the left).
    static RandomString from_hex(std::string_view hex);
    std::string hex() const;
    const Seed& seed() const noexcept { return seed_; }

    // Stateless access to the value at a given position of a stream.
    std::uint64_t word_at(std::string_view label, std::uint64_t counter) const;
    std::uint64_t counter(std::string_view label) const;

    std::uint64_t next_word(std::string_view label);
    double derive_uniform(std::string_view label);
    std::size_t derive_choice(std::string_view label, std::size_t n);
    std::vector<std::size_t> derive_permutation(std::string_view label, std::size_t n);

    // Independent child string, e.g. one per paired trial.
    RandomString derive_child(std::string_view label, std::uint64_t index) const;

    friend bool operator==(const RandomString& a, const RandomString& b) { return a.seed_ == b.seed_; }

private:
    Seed seed_;
    std::map<std::string, std::uint64_t, std::less<>> counters_;
};

// Sub-stream labels used by the replicable learners.
namespace streams {
inline constexpr std::string_view kThresholdStart = "v_init";
inline constexpr std::string_view kThresholdStartFinal = "v_init_final";
inline constexpr std::string_view kThresholdIndex = "v_index";
inline constexpr std::string_view kFinalOrder = "final_order";
std::string rstat_round(std::size_t round);
} // namespace streams

// Keyed 64-bit hash used for seeds and signatures outside of b.
std::uint64_t keyed_hash64(const RandomString::Seed& key, std::string_view msg);
std::uint64_t fnv1a64(std::string_view bytes);

} // namespace rdal
