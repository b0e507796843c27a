#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "rdal/shared_randomness.hpp"

namespace rdal {

struct SQParams {
    double rho = 0.1;
    double tau = 0.1;
    double delta = 0.01;

    double beta() const noexcept { return rho - 2.0 * delta; }
    // Throws ParameterError unless all of rho, tau, delta lie in (0,1) and rho > 2 delta.
    void validate() const;
};

// Geometry of the randomly offset rounding grid for one query.
struct RoundingGrid {
    double radius = 0.0;  // concentration radius r = tau * beta / (1 + beta)
    double spacing = 0.0; // s = 2 (tau - r)
    double offset = 0.0;  // u in [0, s)
};

// ceil((1 + beta)^2 ln(2/delta) / (2 tau^2 beta^2)): Hoeffding puts the
// empirical mean within r of the true mean except with probability delta.
std::uint64_t required_sample_size(const SQParams& p);

RoundingGrid rounding_grid(const SQParams& p, double offset_unit);
// Nearest grid point to `mean`, clamped to [0,1].
double round_to_grid(const RoundingGrid& g, double mean);

// Replicable estimate of E[phi] from query outputs in [0,1]. The grid offset
// is drawn from `rs` under `label`, so paired runs share it.
double rstat_answer(const SQParams& p, std::span<const double> values, RandomString& rs,
                    std::string_view label);

// Same mechanism for a 0/1 query given only the number of ones among `count` draws.
double rstat_answer_counts(const SQParams& p, std::uint64_t ones, std::uint64_t count,
                           RandomString& rs, std::string_view label);

} // namespace rdal
