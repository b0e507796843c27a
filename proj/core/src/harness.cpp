#include "rdal/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rdal/baselines.hpp"
#include "rdal/errors.hpp"
#include "rdal/replicable.hpp"

namespace rdal {

using nlohmann::json;

namespace {

const std::vector<std::string> kAlgorithms{"erm", "cal", "a2", "replical", "replica2"};

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex64(const std::string& text) {
    std::string_view s = text;
    if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
        throw Error(ErrorCode::InputError, "invalid 64-bit hex seed '" + text + "'");
    return v;
}

json expect_object(const json& j, const char* where) {
    if (!j.is_object()) throw Error(ErrorCode::InputError, std::string(where) + " must be an object");
    return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
            throw Error(ErrorCode::InputError, std::string("unknown field '") + it.key() + "' in " + where);
    }
}

template <class T>
T get_as(const json& j, const char* name) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::InputError, std::string("field '") + name + "' has the wrong type");
    }
}

std::uint64_t seed_value(const json& j) {
    if (j.is_string()) return parse_hex64(j.get<std::string>());
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    throw Error(ErrorCode::InputError, "data_seed must be a hex string or a nonnegative integer");
}

void check_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw Error(ErrorCode::ParameterError, std::string(name) + " must lie in (0,1)");
}

struct SideOutcome {
    bool ok = false;
    std::vector<Label> signature;
    RunResult result;
    std::string failure;
};

struct TrialOutcome {
    TrialSeeds seeds;
    SideOutcome side[2];
};

SideOutcome run_side(const Learner& learner, const Problem& problem, const LearnerParams& params,
                     const RandomString& b, std::uint64_t data_seed) {
    SideOutcome out;
    try {
        DataStream data(data_seed);
        out.result = learner(problem, params, b, data);
        out.signature = out.result.signature;
        out.ok = true;
    } catch (const Error& e) {
        out.failure = std::string(to_string(e.code()));
    }
    return out;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; results are indexed,
// so aggregation order never depends on scheduling.
template <class Fn>
void for_each_index(std::size_t n, unsigned threads, Fn fn) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void add_error(ErrorStats& s, double err, double target) {
    s.mean += err;
    s.max = s.runs == 0 ? err : std::max(s.max, err);
    ++s.runs;
    if (err <= target + kProbTolerance) ++s.within_target;
}

json trace_json(const RoundRecord& r) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return json{{"round", r.round},         {"delta_hat", num(r.delta_hat)}, {"delta_true", num(r.delta_true)},
                {"version_size", r.version_size}, {"survivors", r.survivors}, {"threshold", num(r.threshold)},
                {"sigma", num(r.sigma)},     {"labels_so_far", r.labels_so_far}};
}

json grid_json(const ThresholdGrid& g) {
    return json{{"v_init", g.v_init},       {"spacing", g.spacing},   {"count", g.count},
                {"selected_index", g.selected_index}, {"threshold", g.selected()}, {"range_top", g.range_top}};
}

json stats_json(const ErrorStats& s) {
    return json{{"runs", s.runs}, {"mean", s.mean}, {"max", s.max}, {"within_target", s.within_target}};
}

ErrorStats stats_from(const json& j) {
    return ErrorStats{j.at("runs").get<std::size_t>(), j.at("mean").get<double>(), j.at("max").get<double>(),
                      j.at("within_target").get<std::size_t>()};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InputError, "cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw Error(ErrorCode::InputError, "failed writing '" + path + "'");
}

} // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

ExperimentConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InputError, std::string("config is not valid JSON: ") + e.what());
    }
    expect_object(j, "config");
    reject_unknown(j,
                   {"class", "distribution", "oracle", "algorithm", "sweep", "epsilon", "delta", "rho", "nu", "theta",
                    "constants", "trials", "b_seed_policy", "b_seed", "data_seed", "stream_accounting",
                    "same_data_both_sides", "threads"},
                   "config");
    ExperimentConfig cfg;
    if (j.contains("class")) {
        const auto& c = expect_object(j["class"], "class");
        reject_unknown(c, {"generator", "size", "matrix"}, "class");
        if (c.contains("generator")) cfg.hypothesis_class.generator = get_as<std::string>(c["generator"], "generator");
        if (c.contains("size")) cfg.hypothesis_class.size = get_as<std::size_t>(c["size"], "size");
        if (c.contains("matrix"))
            cfg.hypothesis_class.matrix = get_as<std::vector<std::vector<Label>>>(c["matrix"], "matrix");
    }
    if (j.contains("distribution")) {
        const auto& d = expect_object(j["distribution"], "distribution");
        reject_unknown(d, {"kind", "weights"}, "distribution");
        if (d.contains("kind")) cfg.distribution.kind = get_as<std::string>(d["kind"], "kind");
        if (d.contains("weights")) cfg.distribution.weights = get_as<std::vector<double>>(d["weights"], "weights");
    }
    if (j.contains("oracle")) {
        const auto& o = expect_object(j["oracle"], "oracle");
        reject_unknown(o, {"kind", "target", "base_labels", "eta", "eta_per_point"}, "oracle");
        if (o.contains("kind")) cfg.oracle.kind = get_as<std::string>(o["kind"], "kind");
        if (o.contains("target")) cfg.oracle.target = get_as<std::size_t>(o["target"], "target");
        if (o.contains("base_labels")) cfg.oracle.base_labels = get_as<std::vector<Label>>(o["base_labels"], "base_labels");
        if (o.contains("eta")) cfg.oracle.eta = get_as<double>(o["eta"], "eta");
        if (o.contains("eta_per_point"))
            cfg.oracle.eta_per_point = get_as<std::vector<double>>(o["eta_per_point"], "eta_per_point");
    }
    if (j.contains("algorithm")) cfg.algorithm = get_as<std::string>(j["algorithm"], "algorithm");
    if (j.contains("sweep")) {
        const auto& s = expect_object(j["sweep"], "sweep");
        reject_unknown(s, {"algorithms", "epsilons"}, "sweep");
        if (s.contains("algorithms")) cfg.sweep_algorithms = get_as<std::vector<std::string>>(s["algorithms"], "algorithms");
        if (s.contains("epsilons")) cfg.sweep_epsilons = get_as<std::vector<double>>(s["epsilons"], "epsilons");
    }
    if (j.contains("epsilon")) cfg.epsilon = get_as<double>(j["epsilon"], "epsilon");
    if (j.contains("delta")) cfg.delta = get_as<double>(j["delta"], "delta");
    if (j.contains("rho")) cfg.rho = get_as<double>(j["rho"], "rho");
    if (j.contains("nu") && !j["nu"].is_null()) cfg.nu = get_as<double>(j["nu"], "nu");
    if (j.contains("theta") && !j["theta"].is_null()) cfg.theta = get_as<double>(j["theta"], "theta");
    if (j.contains("constants")) {
        const auto& c = expect_object(j["constants"], "constants");
        for (auto it = c.begin(); it != c.end(); ++it)
            if (!it.value().is_null() && !cfg.constants.set(it.key(), get_as<double>(it.value(), "constants")))
                throw Error(ErrorCode::InputError, "unknown constant '" + it.key() + "'");
    }
    if (j.contains("trials")) cfg.trials = get_as<std::size_t>(j["trials"], "trials");
    if (j.contains("b_seed_policy")) {
        const auto p = get_as<std::string>(j["b_seed_policy"], "b_seed_policy");
        if (p == "fixed") cfg.b_seed_policy = SeedPolicy::Fixed;
        else if (p == "per_trial") cfg.b_seed_policy = SeedPolicy::PerTrial;
        else throw Error(ErrorCode::InputError, "b_seed_policy must be 'fixed' or 'per_trial'");
    }
    if (j.contains("b_seed")) cfg.b_seed = get_as<std::string>(j["b_seed"], "b_seed");
    if (j.contains("data_seed")) cfg.data_seed = seed_value(j["data_seed"]);
    if (j.contains("stream_accounting")) cfg.stream_accounting = get_as<bool>(j["stream_accounting"], "stream_accounting");
    if (j.contains("same_data_both_sides"))
        cfg.same_data_both_sides = get_as<bool>(j["same_data_both_sides"], "same_data_both_sides");
    if (j.contains("threads")) cfg.threads = get_as<unsigned>(j["threads"], "threads");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InputError, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["class"] = {{"generator", cfg.hypothesis_class.generator}, {"size", cfg.hypothesis_class.size}};
    if (!cfg.hypothesis_class.matrix.empty()) j["class"]["matrix"] = cfg.hypothesis_class.matrix;
    j["distribution"] = {{"kind", cfg.distribution.kind}};
    if (!cfg.distribution.weights.empty()) j["distribution"]["weights"] = cfg.distribution.weights;
    j["oracle"] = {{"kind", cfg.oracle.kind}};
    if (cfg.oracle.target) j["oracle"]["target"] = *cfg.oracle.target;
    if (!cfg.oracle.base_labels.empty()) j["oracle"]["base_labels"] = cfg.oracle.base_labels;
    if (cfg.oracle.eta) j["oracle"]["eta"] = *cfg.oracle.eta;
    if (!cfg.oracle.eta_per_point.empty()) j["oracle"]["eta_per_point"] = cfg.oracle.eta_per_point;
    j["algorithm"] = cfg.algorithm;
    if (!cfg.sweep_algorithms.empty() || !cfg.sweep_epsilons.empty())
        j["sweep"] = {{"algorithms", cfg.sweep_algorithms}, {"epsilons", cfg.sweep_epsilons}};
    j["epsilon"] = cfg.epsilon;
    j["delta"] = cfg.delta;
    j["rho"] = cfg.rho;
    if (cfg.nu) j["nu"] = *cfg.nu;
    if (cfg.theta) j["theta"] = *cfg.theta;
    const Constants& c = cfg.constants;
    j["constants"] = {{"c_pass", c.c_pass}, {"c_cal", c.c_cal}, {"c_a2", c.c_a2},   {"c_a2_final", c.c_a2_final},
                      {"c_k1", c.c_k1},     {"c_k2", c.c_k2},   {"c_k3", c.c_k3},   {"c_grid", c.c_grid},
                      {"c_T", c.c_T}};
    if (c.forced_spacing) j["constants"]["forced_spacing"] = *c.forced_spacing;
    j["trials"] = cfg.trials;
    j["b_seed_policy"] = cfg.b_seed_policy == SeedPolicy::Fixed ? "fixed" : "per_trial";
    j["b_seed"] = cfg.b_seed;
    j["data_seed"] = hex64(cfg.data_seed);
    j["stream_accounting"] = cfg.stream_accounting;
    j["same_data_both_sides"] = cfg.same_data_both_sides;
    j["threads"] = cfg.threads;
    return j.dump(2);
}

void validate(const ExperimentConfig& cfg) {
    check_unit(cfg.epsilon, "epsilon");
    check_unit(cfg.delta, "delta");
    check_unit(cfg.rho, "rho");
    if (cfg.nu && !(*cfg.nu >= 0.0 && *cfg.nu <= 1.0)) throw Error(ErrorCode::ParameterError, "nu must lie in [0,1]");
    if (cfg.theta && !(*cfg.theta > 0.0)) throw Error(ErrorCode::ParameterError, "theta must be positive");
    if (cfg.trials == 0) throw Error(ErrorCode::ParameterError, "trials must be at least 1");
    if (cfg.threads == 0) throw Error(ErrorCode::ParameterError, "threads must be at least 1");
    auto known = [](const std::string& a) { return std::find(kAlgorithms.begin(), kAlgorithms.end(), a) != kAlgorithms.end(); };
    if (!known(cfg.algorithm)) throw Error(ErrorCode::InputError, "unknown algorithm '" + cfg.algorithm + "'");
    for (const auto& a : cfg.sweep_algorithms)
        if (!known(a)) throw Error(ErrorCode::InputError, "unknown algorithm '" + a + "'");
    for (double e : cfg.sweep_epsilons) check_unit(e, "sweep epsilon");
    if (cfg.oracle.kind != "realizable" && cfg.oracle.kind != "agnostic")
        throw Error(ErrorCode::InputError, "oracle kind must be 'realizable' or 'agnostic'");
    if (cfg.oracle.eta && !(*cfg.oracle.eta >= 0.0 && *cfg.oracle.eta <= 1.0))
        throw Error(ErrorCode::ParameterError, "eta must lie in [0,1]");
    RandomString::from_hex(cfg.b_seed);
    build_instance(cfg);
}

HypothesisIndex default_target(const ClassSpec& spec) {
    if (spec.generator == "thresholds") return spec.size / 2;
    return 0;
}

Instance build_instance(const ExperimentConfig& cfg) {
    const auto& spec = cfg.hypothesis_class;
    auto cls = [&] {
        if (spec.generator == "explicit") {
            if (spec.matrix.empty()) throw Error(ErrorCode::InputError, "explicit class needs a matrix");
            return HypothesisClass(spec.matrix.front().size(), spec.matrix);
        }
        if (spec.size == 0) throw Error(ErrorCode::InputError, "class size must be at least 1");
        if (spec.generator == "thresholds") return HypothesisClass::thresholds(spec.size);
        if (spec.generator == "intervals") return HypothesisClass::intervals(spec.size);
        if (spec.generator == "worst_case") return HypothesisClass::worst_case(spec.size);
        throw Error(ErrorCode::InputError, "unknown class generator '" + spec.generator + "'");
    }();
    const std::size_t n = cls.domain_size();

    std::vector<double> weights;
    if (cfg.distribution.kind == "uniform") weights = DataModel::uniform_weights(n);
    else if (cfg.distribution.kind == "explicit") weights = cfg.distribution.weights;
    else throw Error(ErrorCode::InputError, "distribution kind must be 'uniform' or 'explicit'");
    if (weights.size() != n) throw Error(ErrorCode::InputError, "distribution weights must cover the domain");

    const HypothesisIndex target = cfg.oracle.target.value_or(default_target(spec));
    if (target >= cls.size()) throw Error(ErrorCode::InputError, "oracle target index out of range");
    if (cfg.oracle.kind == "realizable") {
        auto model = DataModel::realizable(cls, std::move(weights), target);
        return Instance{std::move(cls), std::move(model)};
    }
    std::vector<Label> base = cfg.oracle.base_labels;
    if (base.empty()) {
        auto row = cls.row(target);
        base.assign(row.begin(), row.end());
    }
    std::vector<double> flip = cfg.oracle.eta_per_point;
    if (flip.empty()) flip.assign(n, cfg.oracle.eta.value_or(0.0));
    auto model = DataModel::agnostic(std::move(weights), std::move(base), std::move(flip));
    return Instance{std::move(cls), std::move(model)};
}

Learner learner_for(const std::string& algo) {
    if (algo == "erm")
        return [](const Problem& p, const LearnerParams& lp, RandomString, DataStream& d) { return run_passive_erm(p, lp, d); };
    if (algo == "cal")
        return [](const Problem& p, const LearnerParams& lp, RandomString, DataStream& d) { return run_cal(p, lp, d); };
    if (algo == "a2")
        return [](const Problem& p, const LearnerParams& lp, RandomString, DataStream& d) { return run_a2(p, lp, d); };
    if (algo == "replical") return run_replical;
    if (algo == "replica2") return run_replica2;
    throw Error(ErrorCode::InputError, "unknown algorithm '" + algo + "'");
}

LearnerParams learner_params(const ExperimentConfig& cfg) {
    return LearnerParams{cfg.epsilon, cfg.delta, cfg.rho, cfg.constants, cfg.stream_accounting};
}

TrialSeeds trial_seeds(const ExperimentConfig& cfg, std::size_t index) {
    const auto master = RandomString::from_hex(cfg.b_seed);
    TrialSeeds s;
    s.b = cfg.b_seed_policy == SeedPolicy::Fixed ? master : master.derive_child("trial", index);
    RandomString::Seed key{};
    for (int i = 0; i < 8; ++i) key[i] = static_cast<std::uint8_t>(cfg.data_seed >> (8 * i));
    const std::string tag = "data/" + std::to_string(index);
    s.data_first = keyed_hash64(key, tag + "/0");
    s.data_second = cfg.same_data_both_sides ? s.data_first : keyed_hash64(key, tag + "/1");
    return s;
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

ReplicabilityReport run_paired_trials(const ExperimentConfig& cfg) {
    validate(cfg);
    return run_paired_trials(cfg, learner_for(cfg.algorithm));
}

ReplicabilityReport run_paired_trials(const ExperimentConfig& cfg, const Learner& learner) {
    const Instance inst = build_instance(cfg);
    const Problem problem = make_problem(inst.cls, inst.model, cfg.theta, cfg.nu);
    const LearnerParams params = learner_params(cfg);
    const double exact_nu = noise_rate(inst.cls, inst.model).nu;
    const double target = exact_nu + cfg.epsilon;

    std::vector<TrialOutcome> outcomes(cfg.trials);
    for_each_index(cfg.trials, cfg.threads, [&](std::size_t i) {
        auto& o = outcomes[i];
        o.seeds = trial_seeds(cfg, i);
        o.side[0] = run_side(learner, problem, params, o.seeds.b, o.seeds.data_first);
        o.side[1] = run_side(learner, problem, params, o.seeds.b, o.seeds.data_second);
    });

    ReplicabilityReport rep;
    rep.algo = cfg.algorithm;
    rep.b_seed = cfg.b_seed;
    rep.data_seed = cfg.data_seed;
    rep.pairs = cfg.trials;
    std::size_t runs = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        const bool agreed = o.side[0].ok && o.side[1].ok && o.side[0].signature == o.side[1].signature;
        if (agreed) ++rep.agreements;
        if (!o.side[0].ok || !o.side[1].ok) ++rep.failed_pairs;
        for (std::size_t s = 0; s < 2; ++s) {
            const auto& side = o.side[s];
            TrialRecord rec;
            rec.trial = i;
            rec.side = s;
            rec.algo = side.ok ? side.result.algo : cfg.algorithm;
            rec.epsilon = cfg.epsilon;
            rec.delta = cfg.delta;
            rec.rho = cfg.rho;
            rec.nu = problem.nu;
            rec.theta = problem.theta;
            rec.b_seed = o.seeds.b.hex();
            rec.data_seed = s == 0 ? o.seeds.data_first : o.seeds.data_second;
            rec.agreed = agreed;
            if (!side.ok) {
                rec.failure = side.failure;
                ++rep.failure_categories[side.failure];
                rep.records.push_back(rec);
                continue;
            }
            const auto& r = side.result;
            rec.labels_used = r.labels_used;
            rec.unlabeled_used = r.unlabeled_used;
            rec.rounds = r.rounds;
            rec.err_final = true_error(inst.cls, inst.model, r.hypothesis);
            rec.signature_hash = r.signature_hash();
            add_error(s == 0 ? rep.first_side : rep.second_side, rec.err_final, target);
            rep.mean_labels += static_cast<double>(r.labels_used);
            rep.max_labels = std::max(rep.max_labels, r.labels_used);
            rep.mean_unlabeled += static_cast<double>(r.unlabeled_used);
            rep.max_unlabeled = std::max(rep.max_unlabeled, r.unlabeled_used);
            ++runs;
            for (std::size_t t = 1; t < r.trace.size(); ++t) {
                ++rep.round_transitions;
                if (r.trace[t].delta_true <= r.trace[t - 1].delta_true / 2.0 + kProbTolerance)
                    ++rep.halving_transitions;
            }
            rep.records.push_back(rec);
        }
    }
    for (auto* s : {&rep.first_side, &rep.second_side})
        if (s->runs > 0) s->mean /= static_cast<double>(s->runs);
    if (runs > 0) {
        rep.mean_labels /= static_cast<double>(runs);
        rep.mean_unlabeled /= static_cast<double>(runs);
    }
    rep.agreement_rate = static_cast<double>(rep.agreements) / static_cast<double>(rep.pairs);
    const auto w = wilson_interval(rep.agreements, rep.pairs);
    rep.wilson_low = w.low;
    rep.wilson_high = w.high;
    rep.halving_frequency = rep.round_transitions == 0
                                ? 1.0
                                : static_cast<double>(rep.halving_transitions) / static_cast<double>(rep.round_transitions);
    return rep;
}

SweepTable label_complexity_sweep(const ExperimentConfig& cfg, const std::vector<double>& eps_list) {
    validate(cfg);
    const Instance inst = build_instance(cfg);
    const Problem problem = make_problem(inst.cls, inst.model, cfg.theta, cfg.nu);
    const auto algos = cfg.sweep_algorithms.empty() ? std::vector<std::string>{cfg.algorithm} : cfg.sweep_algorithms;
    SweepTable table;
    for (double eps : eps_list) {
        check_unit(eps, "sweep epsilon");
        for (const auto& algo : algos) {
            const Learner learner = learner_for(algo);
            LearnerParams params = learner_params(cfg);
            params.epsilon = eps;
            std::vector<SideOutcome> runs(cfg.trials);
            for_each_index(cfg.trials, cfg.threads, [&](std::size_t i) {
                const auto seeds = trial_seeds(cfg, i);
                runs[i] = run_side(learner, problem, params, seeds.b, seeds.data_first);
            });
            SweepRow row;
            row.algo = algo;
            row.epsilon = eps;
            row.trials = cfg.trials;
            std::size_t ok = 0;
            for (const auto& r : runs) {
                if (!r.ok) {
                    ++row.failures;
                    continue;
                }
                ++ok;
                row.mean_labels += static_cast<double>(r.result.labels_used);
                row.max_labels = std::max(row.max_labels, r.result.labels_used);
                row.mean_unlabeled += static_cast<double>(r.result.unlabeled_used);
                row.mean_rounds += static_cast<double>(r.result.rounds);
                row.mean_err += true_error(inst.cls, inst.model, r.result.hypothesis);
            }
            if (ok > 0) {
                const double d = static_cast<double>(ok);
                row.mean_labels /= d;
                row.mean_unlabeled /= d;
                row.mean_rounds /= d;
                row.mean_err /= d;
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

std::string report_csv(const ReplicabilityReport& report) {
    std::string out =
        "trial,algo,epsilon,delta,rho,nu,theta,labels_used,unlabeled_used,rounds,err_final,signature_hash,b_seed,"
        "data_seed,agreed\n";
    for (const auto& r : report.records) {
        const bool ok = r.failure.empty();
        out += std::to_string(r.trial) + ',' + r.algo + ',' + format_double(r.epsilon) + ',' +
               format_double(r.delta) + ',' + format_double(r.rho) + ',' + format_double(r.nu) + ',' +
               format_double(r.theta) + ',' + std::to_string(r.labels_used) + ',' + std::to_string(r.unlabeled_used) +
               ',' + std::to_string(r.rounds) + ',' + (ok ? format_double(r.err_final) : std::string()) + ',' +
               (ok ? hex64(r.signature_hash) : std::string()) + ',' + r.b_seed + ',' + hex64(r.data_seed) + ',' +
               (r.agreed ? "1" : "0") + '\n';
    }
    return out;
}

std::string report_json(const ReplicabilityReport& report) {
    json j;
    j["algo"] = report.algo;
    j["b_seed"] = report.b_seed;
    j["data_seed"] = hex64(report.data_seed);
    j["pairs"] = report.pairs;
    j["agreements"] = report.agreements;
    j["failed_pairs"] = report.failed_pairs;
    j["agreement_rate"] = report.agreement_rate;
    j["wilson_low"] = report.wilson_low;
    j["wilson_high"] = report.wilson_high;
    j["first_side"] = stats_json(report.first_side);
    j["second_side"] = stats_json(report.second_side);
    j["mean_labels"] = report.mean_labels;
    j["max_labels"] = report.max_labels;
    j["mean_unlabeled"] = report.mean_unlabeled;
    j["max_unlabeled"] = report.max_unlabeled;
    j["round_transitions"] = report.round_transitions;
    j["halving_transitions"] = report.halving_transitions;
    j["halving_frequency"] = report.halving_frequency;
    j["failure_categories"] = report.failure_categories;
    j["records"] = json::array();
    for (const auto& r : report.records) {
        j["records"].push_back({{"trial", r.trial},
                                {"side", r.side},
                                {"algo", r.algo},
                                {"epsilon", r.epsilon},
                                {"delta", r.delta},
                                {"rho", r.rho},
                                {"nu", r.nu},
                                {"theta", r.theta},
                                {"labels_used", r.labels_used},
                                {"unlabeled_used", r.unlabeled_used},
                                {"rounds", r.rounds},
                                {"err_final", r.err_final},
                                {"signature_hash", hex64(r.signature_hash)},
                                {"b_seed", r.b_seed},
                                {"data_seed", hex64(r.data_seed)},
                                {"agreed", r.agreed},
                                {"failure", r.failure}});
    }
    return j.dump(2) + "\n";
}

ReplicabilityReport report_from_json(std::string_view json_text) {
    try {
        const json j = json::parse(json_text);
        ReplicabilityReport rep;
        rep.algo = j.at("algo").get<std::string>();
        rep.b_seed = j.at("b_seed").get<std::string>();
        rep.data_seed = parse_hex64(j.at("data_seed").get<std::string>());
        rep.pairs = j.at("pairs").get<std::size_t>();
        rep.agreements = j.at("agreements").get<std::size_t>();
        rep.failed_pairs = j.at("failed_pairs").get<std::size_t>();
        rep.agreement_rate = j.at("agreement_rate").get<double>();
        rep.wilson_low = j.at("wilson_low").get<double>();
        rep.wilson_high = j.at("wilson_high").get<double>();
        rep.first_side = stats_from(j.at("first_side"));
        rep.second_side = stats_from(j.at("second_side"));
        rep.mean_labels = j.at("mean_labels").get<double>();
        rep.max_labels = j.at("max_labels").get<std::uint64_t>();
        rep.mean_unlabeled = j.at("mean_unlabeled").get<double>();
        rep.max_unlabeled = j.at("max_unlabeled").get<std::uint64_t>();
        rep.round_transitions = j.at("round_transitions").get<std::size_t>();
        rep.halving_transitions = j.at("halving_transitions").get<std::size_t>();
        rep.halving_frequency = j.at("halving_frequency").get<double>();
        rep.failure_categories = j.at("failure_categories").get<std::map<std::string, std::size_t>>();
        for (const auto& r : j.at("records")) {
            TrialRecord rec;
            rec.trial = r.at("trial").get<std::size_t>();
            rec.side = r.at("side").get<std::size_t>();
            rec.algo = r.at("algo").get<std::string>();
            rec.epsilon = r.at("epsilon").get<double>();
            rec.delta = r.at("delta").get<double>();
            rec.rho = r.at("rho").get<double>();
            rec.nu = r.at("nu").get<double>();
            rec.theta = r.at("theta").get<double>();
            rec.labels_used = r.at("labels_used").get<std::uint64_t>();
            rec.unlabeled_used = r.at("unlabeled_used").get<std::uint64_t>();
            rec.rounds = r.at("rounds").get<std::size_t>();
            rec.err_final = r.at("err_final").get<double>();
            rec.signature_hash = parse_hex64(r.at("signature_hash").get<std::string>());
            rec.b_seed = r.at("b_seed").get<std::string>();
            rec.data_seed = parse_hex64(r.at("data_seed").get<std::string>());
            rec.agreed = r.at("agreed").get<bool>();
            rec.failure = r.at("failure").get<std::string>();
            rep.records.push_back(std::move(rec));
        }
        return rep;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InputError, std::string("malformed report: ") + e.what());
    }
}

std::string sweep_csv(const SweepTable& table) {
    std::string out = "algo,epsilon,trials,failures,mean_labels,max_labels,mean_unlabeled,mean_rounds,mean_err\n";
    for (const auto& r : table.rows) {
        out += r.algo + ',' + format_double(r.epsilon) + ',' + std::to_string(r.trials) + ',' +
               std::to_string(r.failures) + ',' + format_double(r.mean_labels) + ',' + std::to_string(r.max_labels) +
               ',' + format_double(r.mean_unlabeled) + ',' + format_double(r.mean_rounds) + ',' +
               format_double(r.mean_err) + '\n';
    }
    return out;
}

std::string sweep_json(const SweepTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"algo", r.algo},
                        {"epsilon", r.epsilon},
                        {"trials", r.trials},
                        {"failures", r.failures},
                        {"mean_labels", r.mean_labels},
                        {"max_labels", r.max_labels},
                        {"mean_unlabeled", r.mean_unlabeled},
                        {"mean_rounds", r.mean_rounds},
                        {"mean_err", r.mean_err}});
    }
    return json{{"rows", rows}}.dump(2) + "\n";
}

std::string run_result_json(const RunResult& result, const Problem& problem) {
    json j;
    j["algo"] = result.algo;
    j["hypothesis"] = result.hypothesis;
    j["name"] = problem.cls.name(result.hypothesis);
    j["signature"] = signature_string(result.signature);
    j["signature_hash"] = hex64(result.signature_hash());
    j["err"] = true_error(problem.cls, problem.model, result.hypothesis);
    j["theta"] = problem.theta;
    j["nu"] = problem.nu;
    j["labels_used"] = result.labels_used;
    j["unlabeled_used"] = result.unlabeled_used;
    j["rounds"] = result.rounds;
    j["final_disagreement_estimate"] = result.final_disagreement_estimate;
    j["survivors"] = result.survivors;
    j["trace"] = json::array();
    for (const auto& r : result.trace) j["trace"].push_back(trace_json(r));
    if (result.grid) j["grid"] = grid_json(*result.grid);
    if (result.final_grid) j["final_grid"] = grid_json(*result.final_grid);
    j["flags"] = result.flags;
    return j.dump(2) + "\n";
}

void export_report(const ReplicabilityReport& report, const std::string& path, ExportFormat format) {
    write_file(path, format == ExportFormat::Csv ? report_csv(report) : report_json(report));
}

void export_sweep(const SweepTable& table, const std::string& path, ExportFormat format) {
    write_file(path, format == ExportFormat::Csv ? sweep_csv(table) : sweep_json(table));
}

} // namespace rdal
