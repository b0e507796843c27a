#include "rdal/learner.hpp"

#include <algorithm>

#include "rdal/errors.hpp"
#include "rdal/shared_randomness.hpp"

namespace rdal {

bool Constants::set(const std::string& key, double value) {
    if (key == "forced_spacing") {
        forced_spacing = value;
        return true;
    }
    double* slot = nullptr;
    if (key == "c_pass") slot = &c_pass;
    else if (key == "c_cal") slot = &c_cal;
    else if (key == "c_a2") slot = &c_a2;
    else if (key == "c_a2_final" || key == "c_a2'") slot = &c_a2_final;
    else if (key == "c_k1") slot = &c_k1;
    else if (key == "c_k2") slot = &c_k2;
    else if (key == "c_k3") slot = &c_k3;
    else if (key == "c_grid") slot = &c_grid;
    else if (key == "c_T" || key == "c_t") slot = &c_T;
    if (slot == nullptr) return false;
    if (!(value > 0.0)) throw Error(ErrorCode::ParameterError, "constant " + key + " must be positive");
    *slot = value;
    return true;
}

Problem make_problem(const HypothesisClass& cls, const DataModel& model,
                     std::optional<double> theta_override, std::optional<double> nu_override) {
    if (cls.domain_size() != model.domain_size())
        throw Error(ErrorCode::InputError, "class and distribution disagree on the domain size");
    const NoiseRate nr = noise_rate(cls, model);
    const double theta = theta_override ? *theta_override : disagreement_coefficient(cls, model, nr.best);
    if (theta_override && !(*theta_override > 0.0))
        throw Error(ErrorCode::ParameterError, "theta override must be positive");
    const double nu = nu_override ? *nu_override : nr.nu;
    if (!(nu >= 0.0 && nu <= 1.0)) throw Error(ErrorCode::ParameterError, "nu must lie in [0,1]");
    return Problem{cls, model, theta, nu, nr.best};
}

std::string signature_string(const std::vector<Label>& sig) {
    std::string s(sig.size(), '0');
    for (std::size_t i = 0; i < sig.size(); ++i) s[i] = sig[i] ? '1' : '0';
    return s;
}

std::uint64_t RunResult::signature_hash() const { return fnv1a64(signature_string(signature)); }

bool RunResult::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

} // namespace rdal
