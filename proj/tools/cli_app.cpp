#include "cli_app.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "ctic/error.hpp"
#include "ctic/io.hpp"
#include "ctic/parallel.hpp"
#include "ctic/qmf.hpp"
#include "ctic/rng.hpp"
#include "ctic/version.hpp"

namespace ctic {

namespace fs = std::filesystem;

namespace {

struct CliOptions {
    std::string config_path;
    std::string preset;
    std::vector<std::string> overrides;
    std::string out_dir;
    int threads = 0;  // 0: unset
};

struct RunContext {
    std::string command;
    json config;
    fs::path out_dir;
    int threads = 1;
    std::map<std::string, std::string> input_digests;
    std::vector<std::string> outputs;
};

void progress(const std::string& msg) { std::cerr << "[ctic] " << msg << "\n"; }

// ---- config plumbing

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        return json::parse(in, nullptr, true, true);  // allow comments
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
}

void deep_merge(json& base, const json& overlay) {
    if (!base.is_object() || !overlay.is_object()) {
        base = overlay;
        return;
    }
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (base.contains(it.key()))
            deep_merge(base[it.key()], it.value());
        else
            base[it.key()] = it.value();
    }
}

void apply_override(json& config, const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects key.path=value, got \"" + spec + "\"");
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // plain string
    }

    json* node = &config;
    std::istringstream ps(path);
    std::string key;
    std::vector<std::string> keys;
    while (std::getline(ps, key, '.')) keys.push_back(key);
    if (keys.empty()) throw ConfigError("--set has an empty key path");
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) node = &((*node)[keys[i]]);
    (*node)[keys.back()] = value;
}

const json& require_key(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key))
        throw ConfigError("config: missing required key \"" + where + key + "\"");
    return j.at(key);
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value at \"" + key + "\": " + e.what());
    }
}

std::vector<double> parse_grid(const json& j, const std::string& where) {
    try {
        if (j.is_array()) return j.get<std::vector<double>>();
        if (j.is_object() && j.contains("linspace")) {
            auto v = j.at("linspace").get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("linspace expects [lo, hi, count]");
            return linspace(v[0], v[1], static_cast<int>(v[2]));
        }
        if (j.is_object() && j.contains("logspace")) {
            auto v = j.at("logspace").get<std::vector<double>>();
            if (v.size() != 3) throw ConfigError("logspace expects [lo, hi, count]");
            return logspace(v[0], v[1], static_cast<int>(v[2]));
        }
    } catch (const json::exception& e) {
        throw ConfigError("config: bad grid at \"" + where + "\": " + e.what());
    }
    throw ConfigError("config: \"" + where +
                      "\" must be an array or {\"linspace\"|\"logspace\": [lo, hi, count]}");
}

// ---- presets

json sweep_preset(const char* kind, const char* axis, int runs) {
    json j{{"command", "sweep"},
           {"kind", kind},
           {"axis", axis},
           {"eps_grid", {{"linspace", {0.0, 1.0, 21}}}},
           {"params", {{"eta", 0.026}, {"lambda", 0.25}}},
           {"delta_pre", 0.2},
           {"phi_ctx", 0.8},
           {"strategy", "random"},
           {"runs", runs},
           {"master_seed", 1}};
    if (std::string(axis) == "eta")
        j["axis2_grid"] = {{"logspace", {0.004, 0.16, 15}}};
    else
        j["axis2_grid"] = {{"linspace", {0.0, 1.0, 11}}};
    return j;
}

const std::map<std::string, json>& preset_registry() {
    static const std::map<std::string, json> presets = [] {
        std::map<std::string, json> p;
        p["paper-fig3-nudge-desk"] = sweep_preset("nudge", "eta", 200);
        p["paper-fig3-prebunk-desk"] = sweep_preset("prebunk", "eta", 200);
        p["paper-fig3-ctx-desk"] = sweep_preset("contextualize", "eta", 200);
        p["paper-fig3-nudge-full"] = sweep_preset("nudge", "eta", 1000);
        p["paper-fig3-prebunk-full"] = sweep_preset("prebunk", "eta", 1000);
        p["paper-fig3-ctx-full"] = sweep_preset("contextualize", "eta", 1000);
        p["paper-fig4-prebunk-desk"] = sweep_preset("prebunk", "delta", 200);
        p["paper-fig4-ctx-desk"] = sweep_preset("contextualize", "phi", 200);
        p["paper-fig4-prebunk-full"] = sweep_preset("prebunk", "delta", 1000);
        p["paper-fig4-ctx-full"] = sweep_preset("contextualize", "phi", 1000);
        p["paper-fig5-targeting-desk"] =
            json{{"command", "targeting"},
                 {"eps_grid", {{"linspace", {0.0, 1.0, 11}}}},
                 {"delta_grid", {{"linspace", {0.0, 1.0, 11}}}},
                 {"strategies", {"degree", "susceptibility", "distance"}},
                 {"params", {{"eta", 0.026}, {"lambda", 0.25}}},
                 {"runs", 200},
                 {"master_seed", 1}};
        p["paper-fig5-targeting-full"] = p["paper-fig5-targeting-desk"];
        p["paper-fig5-targeting-full"]["runs"] = 1000;
        p["paper-fig6-desk"] = json{{"command", "scenarios"},
                                    {"preset_scenarios", "paper"},
                                    {"runs", 200},
                                    {"master_seed", 1}};
        p["paper-fig6-full"] = p["paper-fig6-desk"];
        p["paper-fig6-full"]["runs"] = 1000;
        return p;
    }();
    return presets;
}

json resolve_preset(const std::string& name, const std::string& command) {
    const auto& presets = preset_registry();
    auto it = presets.find(name);
    if (it == presets.end()) {
        std::string known;
        for (const auto& [k, v] : presets) {
            if (!known.empty()) known += ", ";
            known += k;
        }
        throw ConfigError("unknown preset \"" + name + "\"; available presets: " + known);
    }
    if (it->second.at("command").get<std::string>() != command)
        throw ConfigError("preset \"" + name + "\" belongs to subcommand \"" +
                          it->second.at("command").get<std::string>() + "\"");
    json j = it->second;
    j.erase("command");
    return j;
}

// ---- shared loading helpers

std::vector<double> read_value_column(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open value file: " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
        if (tokens.empty() || tokens[0][0] == '#') continue;
        try {
            values.push_back(std::stod(tokens.back()));
        } catch (const std::exception&) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": not a number: \"" + tokens.back() + "\"");
        }
    }
    return values;
}

DirectedGraph load_graph(RunContext& ctx) {
    const json& gcfg = require_key(ctx.config, "graph", "");
    const std::string edges = require_key(gcfg, "edges", "graph.").get<std::string>();
    if (!fs::exists(edges)) throw ConfigError("graph edge list not found: " + edges);
    ctx.input_digests[edges] = file_digest(edges);

    auto loaded = load_edge_list(edges);
    progress("loaded " + std::to_string(loaded.graph.node_count()) + " nodes, " +
             std::to_string(loaded.graph.edge_count()) + " edges (" +
             std::to_string(loaded.self_loops_dropped) + " self-loops dropped, " +
             std::to_string(loaded.duplicates_collapsed) + " duplicates collapsed)");
    DirectedGraph graph = std::move(loaded.graph);

    if (get_or(gcfg, "extract_wcc", false)) {
        graph = largest_weakly_connected_component(graph);
        progress("largest weakly connected component: " +
                 std::to_string(graph.node_count()) + " nodes, " +
                 std::to_string(graph.edge_count()) + " edges");
    }

    if (gcfg.contains("susceptibility")) {
        const std::string path = gcfg.at("susceptibility").get<std::string>();
        if (!fs::exists(path)) throw ConfigError("susceptibility file not found: " + path);
        ctx.input_digests[path] = file_digest(path);
        auto [g, report] = load_susceptibility(graph, path);
        graph = std::move(g);
        progress("susceptibility: " + std::to_string(report.assigned) + " assigned, " +
                 std::to_string(report.defaulted) + " defaulted to 0, " +
                 std::to_string(report.unknown_ids) + " unknown ids");
    } else if (gcfg.contains("bootstrap")) {
        const json& b = gcfg.at("bootstrap");
        const std::string path = require_key(b, "values_from", "graph.bootstrap.")
                                     .get<std::string>();
        if (!fs::exists(path)) throw ConfigError("bootstrap value file not found: " + path);
        ctx.input_digests[path] = file_digest(path);
        auto values = read_value_column(path);
        graph = assign_susceptibility_from_distribution(
            graph, values, get_or<std::uint64_t>(b, "rng_seed", 0));
        progress("bootstrapped susceptibilities from " + std::to_string(values.size()) +
                 " empirical values");
    }

    if (gcfg.contains("id_map_out")) {
        const fs::path map_path = gcfg.at("id_map_out").get<std::string>();
        write_id_map(graph, map_path);
        progress("id map written to " + map_path.string());
    }
    return graph;
}

NodeId resolve_seed_node(const DirectedGraph& graph, const json& config) {
    const std::string spec = get_or<std::string>(config, "seed_node", "auto");
    if (spec == "auto") {
        NodeId seed = select_seed(graph);
        progress("seed node (max out-degree among susceptibility-1 nodes): " +
                 graph.external_id(seed) + ", out-degree " +
                 std::to_string(graph.out_degree(seed)));
        return seed;
    }
    auto v = graph.find_external(spec);
    if (!v) throw ConfigError("seed node \"" + spec + "\" not found in the graph");
    return *v;
}

std::uint64_t master_seed_of(const json& config) {
    return get_or<std::uint64_t>(config, "master_seed", 0);
}

void write_output_json(RunContext& ctx, const json& j, const std::string& name) {
    write_json_file(j, ctx.out_dir / name);
    ctx.outputs.push_back(name);
}

// ---- subcommands

void cmd_seed_select(RunContext& ctx) {
    auto graph = load_graph(ctx);
    NodeId seed = select_seed(graph);
    write_output_json(ctx,
                      json{{"external_id", graph.external_id(seed)},
                           {"internal_id", seed},
                           {"out_degree", graph.out_degree(seed)},
                           {"susceptibility", graph.susceptibility(seed)}},
                      "seed.json");
}

void cmd_simulate(RunContext& ctx) {
    auto graph = load_graph(ctx);
    auto params = params_from_json(require_key(ctx.config, "params", ""));
    auto plan = ctx.config.contains("plan") ? plan_from_json(ctx.config.at("plan"))
                                            : InterventionPlan{};
    NodeId seed = resolve_seed_node(graph, ctx.config);
    const auto rng_seed = get_or<std::uint64_t>(ctx.config, "rng_seed", 0);
    const int runs = get_or(ctx.config, "runs", 1);
    const double grid_step = get_or(ctx.config, "time_grid_step", 0.5);

    std::optional<double> ctx_time;
    if (plan.contextualize && plan.contextualize->phi) {
        const json c = get_or(ctx.config, "ctx", json::object());
        ctx_time = resolve_ctx_time(graph, params, seed, *plan.contextualize->phi,
                                    get_or(c, "runs", 200),
                                    mix_seed(rng_seed, 0xC7E1ULL),
                                    get_or(c, "time_resolution", 0.5), ctx.threads);
        progress("contextualization time T = " + fmt_double(*ctx_time) + " h");
    }

    if (runs == 1) {
        auto result = simulate(graph, params, plan, seed, ctx_time, rng_seed);
        write_activation_csv(graph, result, ctx.out_dir / "activation.csv");
        ctx.outputs.push_back("activation.csv");
        write_curve_csv(result, graph.node_count(), ctx.out_dir / "curve.csv");
        ctx.outputs.push_back("curve.csv");
        json summary = simulation_summary_json(graph, params, plan, seed, result);
        if (ctx_time) summary["ctx_time"] = *ctx_time;
        write_output_json(ctx, summary, "summary.json");
    } else {
        auto summary = monte_carlo_uniform_grid(graph, params, plan, seed, ctx_time, runs,
                                                rng_seed, grid_step, ctx.threads);
        write_mean_curve_csv(summary, ctx.out_dir / "mean_curve.csv");
        ctx.outputs.push_back("mean_curve.csv");
        json sj = monte_carlo_summary_json(graph, params, plan, seed, summary);
        if (ctx_time) sj["ctx_time"] = *ctx_time;
        write_output_json(ctx, sj, "summary.json");
    }
}

SweepConfig sweep_config_from_json(RunContext& ctx, const DirectedGraph& graph,
                                   std::string* axis_out) {
    SweepConfig cfg;
    cfg.kind = intervention_kind_from_string(
        require_key(ctx.config, "kind", "").get<std::string>());
    *axis_out = get_or<std::string>(ctx.config, "axis", "eta");
    cfg.strength_grid = parse_grid(require_key(ctx.config, "eps_grid", ""), "eps_grid");
    cfg.axis2_grid = parse_grid(require_key(ctx.config, "axis2_grid", ""), "axis2_grid");
    if (ctx.config.contains("params")) {
        auto params = params_from_json(ctx.config.at("params"));
        cfg.eta = params.eta;
        cfg.lambda = params.lambda;
    }
    cfg.delta_pre = get_or(ctx.config, "delta_pre", 0.2);
    cfg.phi_ctx = get_or(ctx.config, "phi_ctx", 0.8);
    cfg.strategy = target_strategy_from_string(
        get_or<std::string>(ctx.config, "strategy", "random"));
    cfg.target_seed = get_or<std::uint64_t>(ctx.config, "target_seed", 0);
    cfg.fix_targets = get_or(ctx.config, "fix_targets", false);
    cfg.seed_node = resolve_seed_node(graph, ctx.config);
    cfg.runs = get_or(ctx.config, "runs", 200);
    cfg.master_seed = master_seed_of(ctx.config);
    cfg.threads = ctx.threads;
    const json c = get_or(ctx.config, "ctx", json::object());
    cfg.ctx_resolve_runs = get_or(c, "runs", 200);
    cfg.ctx_time_resolution = get_or(c, "time_resolution", 0.5);
    return cfg;
}

void cmd_sweep(RunContext& ctx) {
    auto graph = load_graph(ctx);
    std::string axis;
    auto cfg = sweep_config_from_json(ctx, graph, &axis);

    SweepGrid grid;
    if (axis == "eta") {
        grid = sweep_strength_vs_contagiousness(graph, cfg);
    } else if (axis == "delta" || axis == "phi") {
        const bool want_prebunk = axis == "delta";
        if (want_prebunk != (cfg.kind == InterventionKind::Prebunk))
            throw ConfigError("axis \"" + axis + "\" does not match kind \"" +
                              to_string(cfg.kind) + "\"");
        grid = sweep_scale_or_timing(graph, cfg);
    } else {
        throw ConfigError("axis must be eta, delta or phi");
    }
    write_sweep_csv(grid, ctx.out_dir / "sweep.csv");
    ctx.outputs.push_back("sweep.csv");
}

void cmd_targeting(RunContext& ctx) {
    auto graph = load_graph(ctx);
    TargetingConfig cfg;
    cfg.eps_grid = parse_grid(require_key(ctx.config, "eps_grid", ""), "eps_grid");
    cfg.delta_grid = parse_grid(require_key(ctx.config, "delta_grid", ""), "delta_grid");
    for (const auto& s : get_or<std::vector<std::string>>(
             ctx.config, "strategies", {"degree", "susceptibility", "distance"}))
        cfg.strategies.push_back(target_strategy_from_string(s));
    if (ctx.config.contains("params")) {
        auto params = params_from_json(ctx.config.at("params"));
        cfg.eta = params.eta;
        cfg.lambda = params.lambda;
    }
    cfg.seed_node = resolve_seed_node(graph, ctx.config);
    cfg.target_seed = get_or<std::uint64_t>(ctx.config, "target_seed", 0);
    cfg.fix_targets = get_or(ctx.config, "fix_targets", false);
    cfg.runs = get_or(ctx.config, "runs", 200);
    cfg.master_seed = master_seed_of(ctx.config);
    cfg.threads = ctx.threads;

    auto result = targeting_differentials(graph, cfg);
    write_targeting_csv(result, ctx.out_dir / "targeting.csv");
    ctx.outputs.push_back("targeting.csv");
}

void cmd_scenarios(RunContext& ctx) {
    auto graph = load_graph(ctx);
    std::vector<Scenario> scenarios;
    if (get_or<std::string>(ctx.config, "preset_scenarios", "") == "paper" ||
        !ctx.config.contains("scenarios")) {
        scenarios = paper_scenarios();
    } else {
        for (const auto& s : ctx.config.at("scenarios")) {
            Scenario scenario;
            scenario.name = require_key(s, "name", "scenarios[].").get<std::string>();
            scenario.params = params_from_json(require_key(s, "params", "scenarios[]."));
            scenario.plan = s.contains("plan") ? plan_from_json(s.at("plan"))
                                               : InterventionPlan{};
            scenarios.push_back(std::move(scenario));
        }
    }

    ScenarioConfig cfg;
    cfg.seed_node = resolve_seed_node(graph, ctx.config);
    cfg.runs = get_or(ctx.config, "runs", 200);
    cfg.master_seed = master_seed_of(ctx.config);
    cfg.threads = ctx.threads;
    const json c = get_or(ctx.config, "ctx", json::object());
    cfg.ctx_resolve_runs = get_or(c, "runs", 200);
    cfg.ctx_time_resolution = get_or(c, "time_resolution", 0.5);

    auto set = combined_scenarios(graph, scenarios, cfg);
    write_scenarios_csv(set, ctx.out_dir / "scenarios.csv");
    ctx.outputs.push_back("scenarios.csv");
    write_output_json(ctx, scenarios_json(set), "scenarios.json");
}

void cmd_calibrate_diffusion(RunContext& ctx) {
    auto graph = load_graph(ctx);
    const std::string cascades_path =
        require_key(ctx.config, "cascades", "").get<std::string>();
    if (!fs::exists(cascades_path))
        throw ConfigError("cascade file not found: " + cascades_path);
    ctx.input_digests[cascades_path] = file_digest(cascades_path);

    auto cascades = load_cascades_csv(cascades_path);
    progress("loaded " + std::to_string(cascades.size()) + " cascades");
    if (ctx.config.contains("filter")) {
        const json& f = ctx.config.at("filter");
        cascades = filter_cascades(std::move(cascades), get_or(f, "min_size", 100),
                                   get_or(f, "within_hours", 100.0));
        progress("retained " + std::to_string(cascades.size()) + " cascades after filtering");
    }

    FitConfig cfg;
    if (ctx.config.contains("eta_grid"))
        cfg.eta_grid = parse_grid(ctx.config.at("eta_grid"), "eta_grid");
    if (ctx.config.contains("lambda_grid"))
        cfg.lambda_grid = parse_grid(ctx.config.at("lambda_grid"), "lambda_grid");
    cfg.loss_window_hours = get_or(ctx.config, "loss_window_hours", 48.0);
    cfg.loss_grid_step = get_or(ctx.config, "loss_grid_step", 1.0);
    cfg.runs_per_cell = get_or(ctx.config, "runs_per_cell", 50);
    cfg.master_seed = master_seed_of(ctx.config);
    cfg.threads = ctx.threads;

    auto fit = fit_diffusion_params(graph, cascades, cfg);
    progress("fit: eta_hat = " + fmt_double(fit.eta_hat) +
             ", lambda_hat = " + fmt_double(fit.lambda_hat));
    write_output_json(ctx, fit_result_json(fit), "fit.json");
    write_loss_surface_csv(fit, ctx.out_dir / "loss_surface.csv");
    ctx.outputs.push_back("loss_surface.csv");
}

void cmd_calibrate_intervention(RunContext& ctx) {
    const std::string survey_path = require_key(ctx.config, "survey", "").get<std::string>();
    if (!fs::exists(survey_path)) throw ConfigError("survey file not found: " + survey_path);
    ctx.input_digests[survey_path] = file_digest(survey_path);

    auto records = load_survey_csv(survey_path);
    auto estimate =
        estimate_intervention_strength(records, get_or(ctx.config, "control_floor", 0.10));
    progress("mean epsilon = " + fmt_double(estimate.mean_epsilon) + " over " +
             std::to_string(estimate.per_item.size()) + " items (" +
             std::to_string(estimate.excluded_items.size()) + " excluded)");
    write_output_json(ctx, strength_estimate_json(estimate), "strength.json");
}

void cmd_qmf(RunContext& ctx) {
    auto graph = load_graph(ctx);
    const std::string mode = get_or<std::string>(ctx.config, "mode", "spectral-radius");
    if (mode == "spectral-radius") {
        auto report = spectral_radius(graph, require_key(ctx.config, "eta", "").get<double>(),
                                      {}, get_or(ctx.config, "tol", 1e-8),
                                      get_or(ctx.config, "max_iter", 10000));
        write_output_json(ctx, spectral_report_json(report), "spectral.json");
    } else if (mode == "nudge-curve") {
        auto grid = parse_grid(require_key(ctx.config, "eta_grid", ""), "eta_grid");
        auto curve = nudge_critical_curve(graph, grid);
        write_critical_curve_csv(curve, "eta", ctx.out_dir / "nudge_critical.csv");
        ctx.outputs.push_back("nudge_critical.csv");
    } else if (mode == "prebunk-curve") {
        auto grid = parse_grid(require_key(ctx.config, "delta_grid", ""), "delta_grid");
        auto strategy = target_strategy_from_string(
            get_or<std::string>(ctx.config, "strategy", "random"));
        std::optional<NodeId> seed;
        if (strategy == TargetStrategy::DistanceFromSeed ||
            ctx.config.contains("seed_node"))
            seed = resolve_seed_node(graph, ctx.config);
        auto curve = prebunk_critical_curve(
            graph, require_key(ctx.config, "eta", "").get<double>(), grid, strategy, seed,
            get_or<std::uint64_t>(ctx.config, "rng_seed", 0),
            get_or(ctx.config, "bisect_tol", 1e-3));
        write_critical_curve_csv(curve, "delta", ctx.out_dir / "prebunk_critical.csv");
        ctx.outputs.push_back("prebunk_critical.csv");
    } else {
        throw ConfigError("qmf mode must be spectral-radius, nudge-curve or prebunk-curve");
    }
}

int dispatch(const std::string& command, const CliOptions& options) {
    const auto started = std::chrono::steady_clock::now();

    RunContext ctx;
    ctx.command = command;
    if (!options.preset.empty()) ctx.config = resolve_preset(options.preset, command);
    if (!options.config_path.empty()) {
        json file_config = load_config_file(options.config_path);
        deep_merge(ctx.config, file_config);
    }
    for (const auto& spec : options.overrides) apply_override(ctx.config, spec);

    // output dir: --out > env > config
    std::string out = options.out_dir;
    if (out.empty())
        if (const char* env = std::getenv("CTIC_OUTPUT_DIR")) out = env;
    if (out.empty()) out = get_or<std::string>(ctx.config, "output_dir", "");
    if (out.empty()) throw ConfigError("no output directory (--out, CTIC_OUTPUT_DIR, or output_dir)");
    ctx.out_dir = out;
    fs::create_directories(ctx.out_dir);

    // threads: --threads > env > config > hardware
    ctx.threads = options.threads;
    if (ctx.threads <= 0)
        if (const char* env = std::getenv("CTIC_THREADS")) ctx.threads = std::atoi(env);
    if (ctx.threads <= 0) ctx.threads = get_or(ctx.config, "threads", 0);
    if (ctx.threads <= 0) ctx.threads = default_thread_count();

    if (command == "simulate") cmd_simulate(ctx);
    else if (command == "sweep") cmd_sweep(ctx);
    else if (command == "targeting") cmd_targeting(ctx);
    else if (command == "scenarios") cmd_scenarios(ctx);
    else if (command == "calibrate-diffusion") cmd_calibrate_diffusion(ctx);
    else if (command == "calibrate-intervention") cmd_calibrate_intervention(ctx);
    else if (command == "qmf") cmd_qmf(ctx);
    else if (command == "seed-select") cmd_seed_select(ctx);
    else throw ConfigError("unknown subcommand: " + command);

    // validate outputs before declaring success
    for (const auto& name : ctx.outputs)
        if (!fs::exists(ctx.out_dir / name))
            throw std::runtime_error("output missing after write: " + name);

    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest{{"command", ctx.command},
                  {"tool_version", kVersion},
                  {"config", ctx.config},
                  {"inputs", ctx.input_digests},
                  {"master_seed", master_seed_of(ctx.config)},
                  {"duration_seconds", duration},
                  {"outputs", ctx.outputs}};
    if (!options.preset.empty()) {
        manifest["preset"] = options.preset;
        // grid resolutions and run budgets in presets are this tool's
        // defaults; the source publication does not report its own
        manifest["preset_provenance"] = "artifact-default";
    }
    write_json_file(manifest, ctx.out_dir / "manifest.json");
    progress("done in " + fmt_double(duration) + " s; outputs in " + ctx.out_dir.string());
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Calibrated CTIC misinformation-diffusion simulator with user interventions"};
    app.require_subcommand(1);

    CliOptions options;
    const char* subcommands[] = {"simulate",          "sweep",
                                 "targeting",         "scenarios",
                                 "calibrate-diffusion", "calibrate-intervention",
                                 "qmf",               "seed-select"};
    const char* descriptions[] = {
        "run one configuration and write activation/curve/summary files",
        "strength-vs-contagiousness or scale/timing prevalence grids",
        "prebunk targeting-strategy differentials vs random selection",
        "single vs combined intervention scenario comparison",
        "grid-search (eta, lambda) against empirical cascades",
        "per-item suppression rates from survey data",
        "spectral radius and QMF critical curves",
        "pick the scenario seed node and record it"};
    for (std::size_t i = 0; i < std::size(subcommands); ++i) {
        auto* sub = app.add_subcommand(subcommands[i], descriptions[i]);
        sub->add_option("--config", options.config_path, "JSON configuration file");
        sub->add_option("--preset", options.preset, "named preset configuration");
        sub->add_option("--set", options.overrides,
                        "config override as key.path=value (repeatable)");
        sub->add_option("--out", options.out_dir, "output directory");
        sub->add_option("--threads", options.threads, "worker thread cap");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return dispatch(app.get_subcommands().front()->get_name(), options);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace ctic
