#include "nlb/cli.hpp"

#include "nlb/defaults.hpp"
#include "nlb/error.hpp"
#include "nlb/experiments.hpp"
#include "nlb/generators.hpp"
#include "nlb/io.hpp"
#include "nlb/returns.hpp"
#include "nlb/solvers.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace nlb {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
    std::string command;
    std::string mdp;
    std::string policy;
    std::string values;
    std::string out = ".";

    std::string transform = "linear";
    double gamma = defaults::gamma;
    double k = defaults::k;
    double kappa = defaults::kappa;
    double r_ref = defaults::r_ref;
    double squash_eps = defaults::squash_eps;

    double tol = defaults::tol;
    std::size_t max_iters = defaults::max_iters;

    std::string alpha = "0.05";
    std::size_t episodes = defaults::episodes;
    std::size_t horizon = defaults::horizon;
    std::optional<std::size_t> start_state;

    std::size_t pairs = defaults::pairs;
    std::optional<double> v_max;

    std::vector<double> gammas;
    std::vector<double> p;
    std::string family = "power";
    std::string mode = "injected";
    double v_lo = -10.0;
    double v_hi = 10.0;
    double v_step = 0.1;

    std::vector<double> rewards;
    std::vector<std::size_t> delays;
    bool outer_log = false;

    std::uint64_t seed = defaults::seed;
};

using Applier = std::function<void(RunConfig&)>;

struct Field {
    std::string help;
    std::function<void(RunConfig&, const json&)> from_json;
    std::function<void(CLI::App*, std::vector<Applier>&)> add_flag;
};

std::string flag_name(const std::string& key) {
    std::string s = "--" + key;
    for (auto& c : s)
        if (c == '_') c = '-';
    return s;
}

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

template <class T, class Get, class Set>
Field make_field(const std::string& key, const std::string& help, Get get, Set set,
                 bool show_default = true) {
    Field f;
    f.help = help;
    f.from_json = [set](RunConfig& c, const json& j) { set(c, j.get<T>()); };
    f.add_flag = [key, help, get, set, show_default](CLI::App* app, std::vector<Applier>& appliers) {
        auto holder = std::make_shared<T>(get(RunConfig{}));
        CLI::Option* opt = nullptr;
        if constexpr (std::is_same_v<T, bool>) {
            opt = app->add_flag(flag_name(key), *holder, help);
        } else {
            opt = app->add_option(flag_name(key), *holder, help);
            // Empty list defaults mean "use the built-in grid"; "[{}]" would only confuse.
            if (show_default && !is_vector<T>::value) opt->capture_default_str();
        }
        appliers.push_back([opt, holder, set](RunConfig& c) {
            if (opt->count() > 0) set(c, *holder);
        });
    };
    return f;
}

template <class T>
Field member_field(const std::string& key, const std::string& help, T RunConfig::*m) {
    return make_field<T>(
        key, help, [m](const RunConfig& c) { return c.*m; },
        [m](RunConfig& c, const T& v) { c.*m = v; });
}

template <class T>
Field optional_field(const std::string& key, const std::string& help,
                     std::optional<T> RunConfig::*m) {
    return make_field<T>(
        key, help, [](const RunConfig&) { return T{}; },
        [m](RunConfig& c, const T& v) { c.*m = v; }, false);
}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["mdp"] = member_field("mdp", "MDP JSON file", &RunConfig::mdp);
        t["policy"] = member_field("policy", "policy JSON file (default: uniform)", &RunConfig::policy);
        t["values"] = member_field("values", "value vector JSON file (qvalues input)", &RunConfig::values);
        t["out"] = member_field("out", "output directory", &RunConfig::out);
        t["transform"] = member_field(
            "transform", "target kind: linear, reward, power, linear-discount, squash, hdtd",
            &RunConfig::transform);
        t["gamma"] = member_field("gamma", "discount parameter gamma", &RunConfig::gamma);
        t["k"] = member_field("k", "hyperbolic parameter k", &RunConfig::k);
        t["kappa"] = member_field("kappa", "contraction cap kappa for value discounts", &RunConfig::kappa);
        t["r_ref"] = member_field("r_ref", "reference reward r", &RunConfig::r_ref);
        t["squash_eps"] = member_field("squash_eps", "linear slope of the squash function",
                                       &RunConfig::squash_eps);
        t["tol"] = member_field("tol", "fixed point tolerance (sup-norm residual)", &RunConfig::tol);
        t["max_iters"] = member_field("max_iters", "fixed point sweep limit", &RunConfig::max_iters);
        t["alpha"] = member_field("alpha", "TD step size in (0, 1], or 'visit' for 1/n(s)",
                                  &RunConfig::alpha);
        t["episodes"] = member_field("episodes", "TD episodes", &RunConfig::episodes);
        t["horizon"] = member_field("horizon", "TD episode step limit", &RunConfig::horizon);
        t["start_state"] = optional_field<std::size_t>(
            "start_state", "TD start state (default: uniform over non-terminal states)",
            &RunConfig::start_state);
        t["pairs"] = member_field("pairs", "random value pairs for the contraction estimate",
                                  &RunConfig::pairs);
        t["v_max"] = optional_field<double>(
            "v_max", "sampling box half-width (default: R_max/(1-gamma), or 10 R_max at gamma=1)",
            &RunConfig::v_max);
        t["gammas"] = member_field("gammas", "gamma values (curves) or gamma grid (gaps)",
                                   &RunConfig::gammas);
        t["p"] = member_field("p", "success probabilities of the risky action", &RunConfig::p);
        t["family"] = member_field("family", "discount family: power or linear", &RunConfig::family);
        t["mode"] = member_field("mode", "successor values: injected or embedded", &RunConfig::mode);
        t["v_lo"] = member_field("v_lo", "lower end of the v grid", &RunConfig::v_lo);
        t["v_hi"] = member_field("v_hi", "upper end of the v grid", &RunConfig::v_hi);
        t["v_step"] = member_field("v_step", "v grid spacing", &RunConfig::v_step);
        t["rewards"] = member_field("rewards", "delayed reward values R", &RunConfig::rewards);
        t["delays"] = member_field("delays", "delays T", &RunConfig::delays);
        t["outer_log"] = member_field("outer_log", "compare log G0 against log r", &RunConfig::outer_log);
        t["seed"] = member_field("seed", "random seed (env NLB_SEED overrides the default)",
                                 &RunConfig::seed);
        return t;
    }();
    return table;
}

void apply_config_file(RunConfig& cfg, const fs::path& path) {
    const json doc = read_json(path);
    if (!doc.is_object()) throw ArgumentError(path.string() + ": config must be a JSON object");
    const auto& table = fields();
    for (const auto& item : doc.items()) {
        if (item.key() == "transform" && item.value().is_object()) {
            // Nested transform spec, e.g. {"kind":"power","gamma":0.5,"kappa":1.0}.
            for (const auto& t : item.value().items()) {
                const std::string key = t.key() == "kind" ? "transform" : t.key();
                static const std::set<std::string> spec_keys = {"transform", "gamma", "k",
                                                                "kappa", "r_ref", "squash_eps"};
                if (!spec_keys.count(key)) {
                    throw ArgumentError(path.string() + ": unknown transform key \"" + t.key() + "\"");
                }
                try {
                    table.at(key).from_json(cfg, t.value());
                } catch (const json::exception& e) {
                    throw ArgumentError(path.string() + ": bad value for transform \"" + t.key() +
                                        "\": " + e.what());
                }
            }
            continue;
        }
        const auto it = table.find(item.key());
        if (it == table.end()) {
            throw ArgumentError(path.string() + ": unknown config key \"" + item.key() + "\"");
        }
        try {
            if (item.key() == "alpha" && item.value().is_number()) {
                cfg.alpha = format_number(item.value().get<double>());
            } else {
                it->second.from_json(cfg, item.value());
            }
        } catch (const json::exception& e) {
            throw ArgumentError(path.string() + ": bad value for \"" + item.key() + "\": " + e.what());
        }
    }
}

TransformSpec make_spec(const RunConfig& c) {
    json doc = {{"kind", c.transform}, {"gamma", c.gamma}};
    if (c.transform == "reward") {
        doc["k"] = c.k;
        doc["r_ref"] = c.r_ref;
    } else if (c.transform == "power" || c.transform == "linear-discount") {
        doc["kappa"] = c.kappa;
    } else if (c.transform == "squash") {
        doc["squash_eps"] = c.squash_eps;
    } else if (c.transform == "hdtd") {
        doc = {{"kind", "hdtd"}, {"k", c.k}};
    } else if (c.transform != "linear") {
        throw ArgumentError("unknown transform \"" + c.transform + "\"");
    }
    return transform_from_json(doc);
}

std::string join_violations(const ValidationReport& report) {
    std::string s;
    for (const auto& v : report) s += (s.empty() ? "" : "; ") + v.message;
    return s;
}

Mdp load_checked_mdp(const RunConfig& c) {
    if (c.mdp.empty()) throw ArgumentError("--mdp is required");
    Mdp mdp = mdp_from_json(read_json(c.mdp));
    const auto report = validate(mdp);
    if (!report.empty()) throw ValidationError("invalid mdp: " + join_violations(report));
    return mdp;
}

Policy load_policy(const RunConfig& c, const Mdp& mdp) {
    if (c.policy.empty()) return Policy::uniform(mdp);
    Policy policy = policy_from_json(read_json(c.policy));
    const auto report = validate(mdp, policy);
    if (!report.empty()) throw ValidationError("invalid policy: " + join_violations(report));
    return policy;
}

fs::path output_dir(const RunConfig& c) {
    fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void print_warnings(const SolveDiagnostics& diag, std::ostream& err) {
    for (const auto& w : diag.warnings) err << "warning: " << w << '\n';
}

int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.mdp.empty()) throw ArgumentError("--mdp is required");
    const Mdp mdp = mdp_from_json(read_json(c.mdp));
    auto report = validate(mdp);
    if (!c.policy.empty()) {
        const auto pr = validate(mdp, policy_from_json(read_json(c.policy)));
        report.insert(report.end(), pr.begin(), pr.end());
    }
    if (!report.empty()) {
        err << "invalid: " << join_violations(report) << '\n';
        return kExitDomain;
    }
    out << "valid: " << mdp.n_states() << " states, " << mdp.n_actions() << " actions\n";
    return kExitOk;
}

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const Mdp mdp = load_checked_mdp(c);
    const Policy policy = load_policy(c, mdp);
    const auto spec = make_spec(c);
    const auto result =
        fixed_point(mdp, policy, spec, ValueVector(mdp.n_states(), 0.0), c.tol, c.max_iters);
    print_warnings(result.diagnostics, err);
    const auto dir = output_dir(c);
    write_json(dir / "values.json", result.values);
    write_json(dir / "diagnostics.json", to_json(result.diagnostics));
    out << spec.describe() << ": converged in " << result.diagnostics.iterations
        << " sweeps, residual " << result.diagnostics.final_residual << '\n';
    return kExitOk;
}

int cmd_td(const RunConfig& c, std::ostream& out, std::ostream&) {
    TdConfig td;
    if (c.alpha == "visit") {
        td.visit_decay = true;
    } else {
        char* end = nullptr;
        td.alpha = std::strtod(c.alpha.c_str(), &end);
        if (end == c.alpha.c_str() || *end != '\0') {
            throw ArgumentError("--alpha must be a number or 'visit'");
        }
    }
    const Mdp mdp = load_checked_mdp(c);
    const Policy policy = load_policy(c, mdp);
    const auto spec = make_spec(c);
    td.episodes = c.episodes;
    td.horizon = c.horizon;
    td.seed = c.seed;
    td.start_state = c.start_state;
    const auto result = td0(mdp, policy, spec, td);
    const auto dir = output_dir(c);
    write_json(dir / "values.json", result.values);
    write_json(dir / "diagnostics.json", to_json(result.diagnostics));
    out << spec.describe() << ": " << result.diagnostics.iterations << " updates, residual "
        << result.diagnostics.final_residual << '\n';
    return kExitOk;
}

int cmd_qvalues(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const Mdp mdp = load_checked_mdp(c);
    const auto spec = make_spec(c);
    ValueVector v;
    if (!c.values.empty()) {
        v = values_from_json(read_json(c.values));
    } else {
        const auto solved = fixed_point(mdp, load_policy(c, mdp), spec,
                                        ValueVector(mdp.n_states(), 0.0), c.tol, c.max_iters);
        print_warnings(solved.diagnostics, err);
        v = solved.values;
    }
    const auto q = action_values(mdp, spec, v);
    const auto dir = output_dir(c);
    write_json(dir / "qvalues.json", to_json(q));
    write_json(dir / "greedy_policy.json", to_json(greedy_policy(q)));
    out << "wrote " << (dir / "qvalues.json").string() << '\n';
    return kExitOk;
}

int cmd_contraction(const RunConfig& c, std::ostream& out, std::ostream&) {
    const Mdp mdp = load_checked_mdp(c);
    const Policy policy = load_policy(c, mdp);
    const auto spec = make_spec(c);
    const double v_max = c.v_max.value_or(default_v_max(mdp, spec));
    const double kappa_hat = empirical_contraction(mdp, policy, spec, c.pairs, v_max, c.seed);
    const auto bound = lipschitz_bound(spec);
    json doc = {{"kappa_hat", kappa_hat}, {"pairs", c.pairs}, {"v_max", v_max}, {"seed", c.seed}};
    if (bound && std::isfinite(*bound)) {
        doc["lipschitz_bound"] = *bound;
    } else {
        doc["lipschitz_bound"] = nullptr;
    }
    write_json(output_dir(c) / "contraction.json", doc);
    out << "kappa_hat " << format_number(kappa_hat) << '\n';
    return kExitOk;
}

int cmd_verify_ordering(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto rewards = c.rewards.empty() ? default_ordering_rewards() : c.rewards;
    const auto delays = c.delays.empty() ? default_ordering_delays() : c.delays;
    const auto grid = ordering_grid(c.gamma, c.k, c.r_ref, rewards, delays, c.outer_log);
    emit_csv(grid.verdicts, output_dir(c) / "ordering.csv");
    out << "cells " << grid.verdicts.size() << ", eligible " << grid.eligible << ", boundary "
        << grid.boundary << ", agreement ";
    if (grid.agreement_fraction) {
        out << format_number(*grid.agreement_fraction) << '\n';
    } else {
        out << "n/a (no eligible cells)\n";
    }
    if (grid.agreeing != grid.eligible) {
        err << "ordering mismatch in " << (grid.eligible - grid.agreeing) << " cells\n";
        return kExitDomain;
    }
    return kExitOk;
}

int cmd_sweep_gaps(const RunConfig& c, std::ostream& out, std::ostream&) {
    const auto ps = c.p.empty() ? default_gap_probabilities() : c.p;
    const auto gammas = c.gammas.empty() ? default_gap_gammas() : c.gammas;
    DiscountFamily family;
    if (c.family == "power") {
        family = DiscountFamily::Power;
    } else if (c.family == "linear") {
        family = DiscountFamily::Linear;
    } else {
        throw ArgumentError("--family must be power or linear");
    }
    GapMode mode;
    if (c.mode == "injected") {
        mode = GapMode::Injected;
    } else if (c.mode == "embedded") {
        mode = GapMode::Embedded;
    } else {
        throw ArgumentError("--mode must be injected or embedded");
    }
    const auto result = action_gap_sweep(ps, gammas, family, c.kappa, mode);
    const auto dir = output_dir(c);
    emit_csv(result, dir / "gaps.csv");
    PlotOptions opts;
    opts.title = "Action gap q(s,b) - q(s,a), " + c.family + " discount";
    opts.y_label = "action gap";
    emit_svg_lineplot(result, dir / "gaps.svg", opts);
    out << "wrote " << (dir / "gaps.csv").string() << " and " << (dir / "gaps.svg").string() << '\n';
    return kExitOk;
}

int cmd_sweep_curves(const RunConfig& c, std::ostream& out, std::ostream&) {
    const auto gammas = c.gammas.empty() ? default_curve_gammas() : c.gammas;
    if (!(c.v_step > 0.0) || !(c.v_hi >= c.v_lo)) throw ArgumentError("bad v grid");
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor((c.v_hi - c.v_lo) / c.v_step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) {
        grid.push_back(std::round((c.v_lo + static_cast<double>(i) * c.v_step) * 1e12) / 1e12);
    }
    const auto result = discount_curves(gammas, grid, c.kappa);
    const auto dir = output_dir(c);
    emit_csv(result, dir / "curves.csv");
    PlotOptions opts;
    opts.title = "Linear (dashed) and power (solid) discounts";
    opts.y_label = "g(v)";
    const auto flat = flatten_series(result);
    for (std::size_t i = 0; i < flat.axes[0].size(); ++i) opts.dashed.push_back(i % 2 == 0);
    emit_svg_lineplot(flat, dir / "curves.svg", opts);
    out << "wrote " << (dir / "curves.csv").string() << " and " << (dir / "curves.svg").string()
        << '\n';
    return kExitOk;
}

struct Command {
    const char* name;
    const char* help;
    std::vector<std::string> keys;
    int (*run)(const RunConfig&, std::ostream&, std::ostream&);
};

const std::vector<std::string> kSpecKeys = {"transform", "gamma", "k", "kappa", "r_ref",
                                            "squash_eps"};

std::vector<std::string> with_spec(std::vector<std::string> keys) {
    keys.insert(keys.end(), kSpecKeys.begin(), kSpecKeys.end());
    return keys;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    const std::vector<Command> commands = {
        {"solve", "fixed point of the generalized Bellman operator",
         with_spec({"mdp", "policy", "tol", "max_iters", "out"}), cmd_solve},
        {"td", "tabular TD(0) with a non-linear target",
         with_spec({"mdp", "policy", "alpha", "episodes", "horizon", "start_state", "seed", "out"}),
         cmd_td},
        {"qvalues", "action values and greedy policy",
         with_spec({"mdp", "policy", "values", "tol", "max_iters", "out"}), cmd_qvalues},
        {"contraction", "empirical contraction factor of the operator",
         with_spec({"mdp", "policy", "pairs", "v_max", "seed", "out"}), cmd_contraction},
        {"verify-ordering", "hyperbolic vs transformed-exponential preference ordering",
         {"gamma", "k", "r_ref", "rewards", "delays", "outer_log", "out"}, cmd_verify_ordering},
        {"sweep-gaps", "action gaps of the two-action risk example (CSV + SVG)",
         {"p", "gammas", "family", "kappa", "mode", "out"}, cmd_sweep_gaps},
        {"sweep-curves", "linear and power discount curves (CSV + SVG)",
         {"gammas", "kappa", "v_lo", "v_hi", "v_step", "out"}, cmd_sweep_curves},
        {"validate", "check an MDP (and optionally a policy) file", {"mdp", "policy"}, cmd_validate},
    };

    CLI::App app{"Non-linear Bellman equations on tabular MDPs"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; command line flags take precedence");

    std::vector<Applier> appliers;
    std::map<const CLI::App*, const Command*> by_app;
    for (const auto& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", config_path,
                        "JSON config file; command line flags take precedence");
        for (const auto& key : cmd.keys) fields().at(key).add_flag(sub, appliers);
        by_app[sub] = &cmd;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadArguments;
    }

    const Command* command = nullptr;
    for (const auto& [sub, cmd] : by_app)
        if (sub->parsed()) command = cmd;

    try {
        RunConfig cfg;
        cfg.command = command->name;
        if (const char* env = std::getenv("NLB_SEED"); env && *env) {
            char* end = nullptr;
            cfg.seed = std::strtoull(env, &end, 10);
            if (*end != '\0') throw ArgumentError("NLB_SEED must be an unsigned integer");
        }
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        for (const auto& apply : appliers) apply(cfg);
        return command->run(cfg, out, err);
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return kExitBadArguments;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
}

} // namespace nlb
