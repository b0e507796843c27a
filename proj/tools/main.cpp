#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdal/diagnostics.hpp"
#include "rdal/errors.hpp"
#include "rdal/harness.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kParameter = 3, kRuntime = 4 };

struct Overrides {
    std::string config;
    std::optional<std::string> algo;
    std::optional<double> epsilon, delta, rho, nu;
    std::optional<std::string> cls;
    std::optional<std::size_t> domain_size, trials;
    std::optional<unsigned> threads;
    std::optional<std::string> b_seed, data_seed;
    std::string out;
    std::string format;
    std::vector<std::string> constants;
    std::vector<double> sweep_eps;
    std::vector<std::string> sweep_algos;
    bool stream_accounting = false;
};

std::uint64_t parse_seed(std::string_view s) {
    if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
        throw rdal::Error(rdal::ErrorCode::InputError, "--data-seed expects up to 16 hex digits");
    return v;
}

rdal::ExperimentConfig make_config(const Overrides& o) {
    rdal::ExperimentConfig cfg = o.config.empty() ? rdal::ExperimentConfig{} : rdal::load_config(o.config);
    if (o.algo) cfg.algorithm = *o.algo;
    if (o.epsilon) cfg.epsilon = *o.epsilon;
    if (o.delta) cfg.delta = *o.delta;
    if (o.rho) cfg.rho = *o.rho;
    if (o.cls) {
        cfg.hypothesis_class.generator = *o.cls;
        cfg.oracle.target.reset();
    }
    if (o.domain_size) {
        cfg.hypothesis_class.size = *o.domain_size;
        cfg.oracle.target.reset();
        cfg.distribution = rdal::DistributionSpec{};
    }
    // Constant label noise of rate nu on the target row; the resulting noise rate is nu.
    if (o.nu) {
        cfg.oracle.kind = "agnostic";
        cfg.oracle.eta = *o.nu;
        cfg.oracle.eta_per_point.clear();
    }
    if (o.trials) cfg.trials = *o.trials;
    if (o.threads) cfg.threads = *o.threads;
    if (o.b_seed) cfg.b_seed = *o.b_seed;
    if (o.data_seed) cfg.data_seed = parse_seed(*o.data_seed);
    if (o.stream_accounting) cfg.stream_accounting = true;
    for (const auto& kv : o.constants) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw rdal::Error(rdal::ErrorCode::InputError, "--constants expects KEY=VAL, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        double v = 0.0;
        auto [end, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
        if (ec != std::errc{} || end != val.data() + val.size())
            throw rdal::Error(rdal::ErrorCode::InputError, "constant '" + key + "' needs a number");
        if (!cfg.constants.set(key, v)) throw rdal::Error(rdal::ErrorCode::InputError, "unknown constant '" + key + "'");
    }
    if (!o.sweep_algos.empty()) cfg.sweep_algorithms = o.sweep_algos;
    if (!o.sweep_eps.empty()) cfg.sweep_epsilons = o.sweep_eps;
    rdal::validate(cfg);
    return cfg;
}

// --out wins; otherwise $RDAL_OUTPUT_DIR/<name>; otherwise stdout.
void emit(const std::string& text, const Overrides& o, const std::string& name) {
    std::string path = o.out;
    if (path.empty()) {
        if (const char* dir = std::getenv("RDAL_OUTPUT_DIR"); dir != nullptr && *dir != '\0')
            path = (std::filesystem::path(dir) / name).string();
    }
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw rdal::Error(rdal::ErrorCode::InputError, "cannot write '" + path + "'");
    f << text;
}

bool want_json(const Overrides& o) { return o.format == "json"; }

int cmd_theta(const Overrides& o) {
    const auto cfg = make_config(o);
    const auto inst = rdal::build_instance(cfg);
    const auto p = rdal::make_problem(inst.cls, inst.model, cfg.theta, cfg.nu);
    std::string text;
    if (want_json(o)) {
        nlohmann::json j{{"theta", p.theta}, {"nu", p.nu}, {"best", p.best}, {"best_name", inst.cls.name(p.best)},
                         {"class_size", inst.cls.size()}, {"domain_size", inst.cls.domain_size()}};
        text = j.dump(2) + "\n";
    } else {
        text = "theta " + rdal::format_double(p.theta) + "\nnu " + rdal::format_double(p.nu) + "\nbest " +
               std::to_string(p.best) + " " + inst.cls.name(p.best) + "\n";
    }
    emit(text, o, want_json(o) ? "theta.json" : "theta.txt");
    return kOk;
}

rdal::RunResult single_run(const rdal::ExperimentConfig& cfg, const rdal::Problem& p) {
    const auto seeds = rdal::trial_seeds(cfg, 0);
    rdal::DataStream data(seeds.data_first);
    return rdal::learner_for(cfg.algorithm)(p, rdal::learner_params(cfg), seeds.b, data);
}

int cmd_run(const Overrides& o) {
    const auto cfg = make_config(o);
    const auto inst = rdal::build_instance(cfg);
    const auto p = rdal::make_problem(inst.cls, inst.model, cfg.theta, cfg.nu);
    emit(rdal::run_result_json(single_run(cfg, p), p), o, "run.json");
    return kOk;
}

int cmd_pair(const Overrides& o) {
    const auto cfg = make_config(o);
    const auto rep = rdal::run_paired_trials(cfg);
    emit(want_json(o) ? rdal::report_json(rep) : rdal::report_csv(rep), o, want_json(o) ? "pair.json" : "pair.csv");
    std::fprintf(stderr, "%s: %zu/%zu pairs agreed (rate %s, 95%% CI [%s, %s]), %zu failed pairs\n", rep.algo.c_str(),
                 rep.agreements, rep.pairs, rdal::format_double(rep.agreement_rate).c_str(),
                 rdal::format_double(rep.wilson_low).c_str(), rdal::format_double(rep.wilson_high).c_str(),
                 rep.failed_pairs);
    return kOk;
}

int cmd_sweep(const Overrides& o) {
    auto cfg = make_config(o);
    auto eps = cfg.sweep_epsilons.empty() ? std::vector<double>{cfg.epsilon} : cfg.sweep_epsilons;
    const auto table = rdal::label_complexity_sweep(cfg, eps);
    emit(want_json(o) ? rdal::sweep_json(table) : rdal::sweep_csv(table), o, want_json(o) ? "sweep.json" : "sweep.csv");
    return kOk;
}

int cmd_gridcheck(const Overrides& o) {
    auto cfg = make_config(o);
    if (cfg.algorithm != "replical" && cfg.algorithm != "replica2")
        cfg.algorithm = cfg.oracle.kind == "agnostic" ? "replica2" : "replical";
    const auto inst = rdal::build_instance(cfg);
    const auto p = rdal::make_problem(inst.cls, inst.model, cfg.theta, cfg.nu);
    const auto result = single_run(cfg, p);
    const auto profile = rdal::run_profile(p, result);
    const auto flags = rdal::classify_thresholds(profile, cfg.rho);
    const auto& g = profile.grid;
    std::string text;
    if (want_json(o)) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < profile.counts.size(); ++i)
            rows.push_back({{"interval", i},
                            {"lower", g.v_init + static_cast<double>(i) * g.spacing},
                            {"upper", g.v_init + static_cast<double>(i + 1) * g.spacing},
                            {"count", profile.counts[i]},
                            {"cumulative", profile.cumulative[i]},
                            {"bad", static_cast<bool>(flags[i])}});
        nlohmann::json j{{"algo", result.algo},         {"v_init", g.v_init},
                         {"spacing", g.spacing},        {"selected_index", g.selected_index},
                         {"overflow", profile.overflow}, {"bad_fraction", rdal::bad_fraction(profile, cfg.rho)},
                         {"intervals", rows}};
        text = j.dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "# algo " << result.algo << " v_init " << rdal::format_double(g.v_init) << " spacing "
           << rdal::format_double(g.spacing) << " selected " << g.selected_index << " overflow " << profile.overflow
           << " bad_fraction " << rdal::format_double(rdal::bad_fraction(profile, cfg.rho)) << "\n";
        os << "interval,lower,upper,count,cumulative,bad\n";
        for (std::size_t i = 0; i < profile.counts.size(); ++i)
            os << i << ',' << rdal::format_double(g.v_init + static_cast<double>(i) * g.spacing) << ','
               << rdal::format_double(g.v_init + static_cast<double>(i + 1) * g.spacing) << ',' << profile.counts[i]
               << ',' << profile.cumulative[i] << ',' << (flags[i] ? 1 : 0) << '\n';
        text = os.str();
    }
    emit(text, o, want_json(o) ? "gridcheck.json" : "gridcheck.csv");
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Replicable disagreement-based active learning simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    Overrides o;
    app.add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--algo", o.algo, "erm | cal | a2 | replical | replica2");
    app.add_option("--epsilon", o.epsilon);
    app.add_option("--delta", o.delta);
    app.add_option("--rho", o.rho);
    app.add_option("--nu", o.nu, "constant label noise rate on the target");
    app.add_option("--class", o.cls, "thresholds | intervals | worst_case");
    app.add_option("--domain-size", o.domain_size);
    app.add_option("--trials", o.trials);
    app.add_option("--threads", o.threads);
    app.add_option("--b-seed", o.b_seed, "shared random string seed (hex)");
    app.add_option("--data-seed", o.data_seed, "data seed (hex)");
    app.add_option("--out", o.out, "output path ('-' for stdout)");
    app.add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json", "text"}));
    app.add_option("--constants", o.constants, "KEY=VAL, repeatable")->allow_extra_args(false);
    app.add_option("--sweep-eps", o.sweep_eps, "epsilon list for sweep")->delimiter(',');
    app.add_option("--sweep-algos", o.sweep_algos, "algorithm list for sweep")->delimiter(',');
    app.add_flag("--stream-accounting", o.stream_accounting, "charge rejected unlabeled draws");

    int (*handler)(const Overrides&) = nullptr;
    app.add_subcommand("theta", "disagreement coefficient, noise rate and best hypothesis")
        ->callback([&] { handler = cmd_theta; });
    app.add_subcommand("run", "one run, printed as JSON")->callback([&] { handler = cmd_run; });
    app.add_subcommand("pair", "paired replicability trials")->callback([&] { handler = cmd_pair; });
    app.add_subcommand("sweep", "label complexity across epsilons")->callback([&] { handler = cmd_sweep; });
    app.add_subcommand("gridcheck", "threshold-grid profile of one replicable run")
        ->callback([&] { handler = cmd_gridcheck; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    try {
        return handler(o);
    } catch (const rdal::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.code()) {
        case rdal::ErrorCode::InputError: return kUsage;
        case rdal::ErrorCode::ParameterError: return kParameter;
        default: return kRuntime;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    }
}
