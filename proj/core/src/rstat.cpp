#include "rdal/rstat.hpp"

#include <algorithm>
#include <cmath>

#include "rdal/errors.hpp"

namespace rdal {

void SQParams::validate() const {
    auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!open_unit(rho) || !open_unit(tau) || !open_unit(delta))
        throw Error(ErrorCode::ParameterError, "rSTAT parameters must lie in (0,1)");
    if (!(beta() > 0.0))
        throw Error(ErrorCode::ParameterError, "rSTAT needs rho > 2 delta");
}

std::uint64_t required_sample_size(const SQParams& p) {
    p.validate();
    const double b = p.beta();
    const double k = (1.0 + b) * (1.0 + b) * std::log(2.0 / p.delta) / (2.0 * p.tau * p.tau * b * b);
    return static_cast<std::uint64_t>(std::ceil(k));
}

RoundingGrid rounding_grid(const SQParams& p, double offset_unit) {
    p.validate();
    RoundingGrid g;
    const double b = p.beta();
    g.radius = p.tau * b / (1.0 + b);
    g.spacing = 2.0 * (p.tau - g.radius);
    g.offset = offset_unit * g.spacing;
    return g;
}

double round_to_grid(const RoundingGrid& g, double mean) {
    const double cell = std::round((mean - g.offset) / g.spacing);
    return std::clamp(g.offset + g.spacing * cell, 0.0, 1.0);
}

double rstat_answer_counts(const SQParams& p, std::uint64_t ones, std::uint64_t count,
                           RandomString& rs, std::string_view label) {
    if (ones > count) throw Error(ErrorCode::InputError, "more ones than draws");
    if (count < required_sample_size(p))
        throw Error(ErrorCode::Precondition, "rSTAT sample smaller than the required size");
    const double mean = static_cast<double>(ones) / static_cast<double>(count);
    return round_to_grid(rounding_grid(p, rs.derive_uniform(label)), mean);
}

double rstat_answer(const SQParams& p, std::span<const double> values, RandomString& rs,
                    std::string_view label) {
    if (values.size() < required_sample_size(p))
        throw Error(ErrorCode::Precondition, "rSTAT sample smaller than the required size");
    double sum = 0.0;
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::InputError, "query outputs must lie in [0,1]");
        sum += v;
    }
    return round_to_grid(rounding_grid(p, rs.derive_uniform(label)), sum / static_cast<double>(values.size()));
}

} // namespace rdal
