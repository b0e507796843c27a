#include "rdal/shared_randomness.hpp"

#include <sodium.h>

#include <cctype>
#include <limits>

#include "rdal/errors.hpp"

namespace rdal {

namespace {

void ensure_sodium() {
    static const bool ready = sodium_init() >= 0;
    if (!ready) throw Error(ErrorCode::InputError, "libsodium failed to initialize");
}

std::uint64_t load_le64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::string stream_message(std::string_view label, std::uint64_t counter) {
    std::string msg(label);
    msg.push_back('\0');
    for (int i = 0; i < 8; ++i) msg.push_back(static_cast<char>((counter >> (8 * i)) & 0xff));
    return msg;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l >= 'a' && l <= 'f') return l - 'a' + 10;
    return -1;
}

} // namespace

std::uint64_t keyed_hash64(const RandomString::Seed& key, std::string_view msg) {
    static_assert(crypto_shorthash_siphash24_KEYBYTES == RandomString::kSeedBytes);
    ensure_sodium();
    unsigned char out[crypto_shorthash_siphash24_BYTES];
    crypto_shorthash_siphash24(out, reinterpret_cast<const unsigned char*>(msg.data()), msg.size(),
                               key.data());
    return load_le64(out);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RandomString RandomString::from_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.empty() || hex.size() > 2 * kSeedBytes)
        throw Error(ErrorCode::InputError, "random string seed must have 1 to 32 hex digits");
    Seed seed{};
    // Right-align: the last digit is the low nibble of the last byte.
    std::size_t nibble = 0;
    for (auto it = hex.rbegin(); it != hex.rend(); ++it, ++nibble) {
        const int v = hex_value(*it);
        if (v < 0) throw Error(ErrorCode::InputError, "invalid hex digit in seed");
        auto& byte = seed[kSeedBytes - 1 - nibble / 2];
        byte = static_cast<std::uint8_t>(byte | (nibble % 2 == 0 ? v : v << 4));
    }
    return RandomString(seed);
}

std::string RandomString::hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (auto b : seed_) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::uint64_t RandomString::word_at(std::string_view label, std::uint64_t counter) const {
    return keyed_hash64(seed_, stream_message(label, counter));
}

std::uint64_t RandomString::counter(std::string_view label) const {
    auto it = counters_.find(label);
    return it == counters_.end() ? 0 : it->second;
}

std::uint64_t RandomString::next_word(std::string_view label) {
    auto it = counters_.find(label);
    if (it == counters_.end()) it = counters_.emplace(std::string(label), 0).first;
    return word_at(label, it->second++);
}

double RandomString::derive_uniform(std::string_view label) {
    return static_cast<double>(next_word(label) >> 11) * 0x1.0p-53;
}

std::size_t RandomString::derive_choice(std::string_view label, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::Precondition, "choice over zero outcomes");
    const std::uint64_t m = n;
    // Largest multiple of m representable, computed without overflow.
    const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % m + 1) % m;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
    for (;;) {
        const std::uint64_t w = next_word(label);
        if (rem == 0 || w < limit + 1) return static_cast<std::size_t>(w % m);
    }
}

std::vector<std::size_t> RandomString::derive_permutation(std::string_view label, std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i-- > 1;) std::swap(p[i], p[derive_choice(label, i + 1)]);
    return p;
}

RandomString RandomString::derive_child(std::string_view label, std::uint64_t index) const {
    std::string base(label);
    base += "/child";
    const std::uint64_t lo = word_at(base, 2 * index);
    const std::uint64_t hi = word_at(base, 2 * index + 1);
    Seed s{};
    for (int i = 0; i < 8; ++i) {
        s[i] = static_cast<std::uint8_t>(hi >> (56 - 8 * i));
        s[8 + i] = static_cast<std::uint8_t>(lo >> (56 - 8 * i));
    }
    return RandomString(s);
}

std::string streams::rstat_round(std::size_t round) { return "rstat_round_" + std::to_string(round); }

} // namespace rdal
