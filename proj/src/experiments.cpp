#include "ctic/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ctic/error.hpp"
#include "ctic/parallel.hpp"
#include "ctic/rng.hpp"

namespace ctic {

namespace {

constexpr std::uint64_t kCtxResolveStream = 0xC7E1ULL;

struct CellStats {
    double mean = 0.0;
    double std = 0.0;
};

/// Monte Carlo mean/std of final prevalence with per-run seeds
/// mix_seed(column_seed, run), i.e. common random numbers within a column.
CellStats run_cell(const DirectedGraph& graph, const DiffusionParams& params,
                   const InterventionPlan& plan, NodeId seed_node,
                   std::optional<double> ctx_time, int runs, std::uint64_t column_seed) {
    double sum = 0.0, sq = 0.0;
    for (int r = 0; r < runs; ++r) {
        auto res = simulate(graph, params, plan, seed_node, ctx_time,
                            mix_seed(column_seed, static_cast<std::uint64_t>(r)));
        sum += res.final_prevalence;
        sq += res.final_prevalence * res.final_prevalence;
    }
    CellStats out;
    out.mean = sum / runs;
    if (runs > 1) {
        double var = (sq - runs * out.mean * out.mean) / (runs - 1);
        out.std = std::sqrt(std::max(0.0, var));
    }
    return out;
}

InterventionPlan plan_for(InterventionKind kind, double eps, const SweepConfig& cfg,
                          double delta, double phi) {
    InterventionPlan plan;
    switch (kind) {
        case InterventionKind::Nudge:
            plan.nudge = NudgeSpec{eps};
            break;
        case InterventionKind::Prebunk:
            plan.prebunk = PrebunkSpec{eps, delta, cfg.strategy, cfg.target_seed,
                                       cfg.fix_targets};
            break;
        case InterventionKind::Contextualize:
            plan.contextualize = ContextualizeSpec{eps, phi, std::nullopt};
            break;
    }
    return plan;
}

void check_grids(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw ValidationError("sweep grids must be nonempty");
    if (!std::is_sorted(a.begin(), a.end()) || !std::is_sorted(b.begin(), b.end()))
        throw ValidationError("sweep grids must be ascending");
}

} // namespace

std::string to_string(InterventionKind k) {
    switch (k) {
        case InterventionKind::Nudge: return "nudge";
        case InterventionKind::Prebunk: return "prebunk";
        case InterventionKind::Contextualize: return "contextualize";
    }
    return "?";
}

InterventionKind intervention_kind_from_string(const std::string& name) {
    if (name == "nudge") return InterventionKind::Nudge;
    if (name == "prebunk") return InterventionKind::Prebunk;
    if (name == "contextualize") return InterventionKind::Contextualize;
    throw ValidationError("unknown intervention kind: \"" + name +
                          "\" (expected nudge|prebunk|contextualize)");
}

SweepGrid sweep_strength_vs_contagiousness(const DirectedGraph& graph,
                                           const SweepConfig& config) {
    check_grids(config.strength_grid, config.axis2_grid);

    SweepGrid grid;
    grid.axis1_name = "epsilon";
    grid.axis2_name = "eta";
    grid.axis1 = config.strength_grid;
    grid.axis2 = config.axis2_grid;
    const std::size_t ne = grid.axis1.size();
    const std::size_t nh = grid.axis2.size();
    grid.prevalence.assign(ne * nh, 0.0);
    grid.relative_prevalence.assign(ne * nh, 0.0);
    grid.prevalence_std.assign(ne * nh, 0.0);

    // T per eta column (contextualization only), from a dedicated batch
    std::vector<double> ctx_times(nh, 0.0);
    if (config.kind == InterventionKind::Contextualize) {
        parallel_for_index(static_cast<std::int64_t>(nh), config.threads, [&](std::int64_t j) {
            DiffusionParams params{grid.axis2[static_cast<std::size_t>(j)], config.lambda};
            ctx_times[static_cast<std::size_t>(j)] = resolve_ctx_time(
                graph, params, config.seed_node, config.phi_ctx, config.ctx_resolve_runs,
                mix_seed(mix_seed(config.master_seed, kCtxResolveStream),
                         static_cast<std::uint64_t>(j)),
                config.ctx_time_resolution);
        });
    }

    std::vector<double> baseline(nh, 0.0);
    const std::size_t cells = ne * nh;
    // one extra slot per column for the no-intervention baseline
    parallel_for_index(static_cast<std::int64_t>(cells + nh), config.threads,
                       [&](std::int64_t flat) {
        const std::size_t j = static_cast<std::size_t>(flat) % nh;
        DiffusionParams params{grid.axis2[j], config.lambda};
        const std::uint64_t column_seed = mix_seed(config.master_seed, j);
        std::optional<double> ctx_time;
        if (config.kind == InterventionKind::Contextualize) ctx_time = ctx_times[j];

        if (static_cast<std::size_t>(flat) >= cells) {
            baseline[j] = run_cell(graph, params, InterventionPlan{}, config.seed_node,
                                   std::nullopt, config.runs, column_seed)
                              .mean;
            return;
        }
        const std::size_t i = static_cast<std::size_t>(flat) / nh;
        auto plan = plan_for(config.kind, grid.axis1[i], config, config.delta_pre,
                             config.phi_ctx);
        auto stats = run_cell(graph, params, plan, config.seed_node, ctx_time, config.runs,
                              column_seed);
        grid.prevalence[grid.index(i, j)] = stats.mean;
        grid.prevalence_std[grid.index(i, j)] = stats.std;
    });

    for (std::size_t i = 0; i < ne; ++i)
        for (std::size_t j = 0; j < nh; ++j)
            grid.relative_prevalence[grid.index(i, j)] =
                grid.prevalence[grid.index(i, j)] / baseline[j];
    return grid;
}

SweepGrid sweep_scale_or_timing(const DirectedGraph& graph, const SweepConfig& config) {
    check_grids(config.strength_grid, config.axis2_grid);
    if (config.kind == InterventionKind::Nudge)
        throw ValidationError("scale/timing sweeps apply to prebunk or contextualize");

    const bool is_prebunk = config.kind == InterventionKind::Prebunk;

    SweepGrid grid;
    grid.axis1_name = "epsilon";
    grid.axis2_name = is_prebunk ? "delta" : "phi";
    grid.axis1 = config.strength_grid;
    grid.axis2 = config.axis2_grid;
    const std::size_t ne = grid.axis1.size();
    const std::size_t na = grid.axis2.size();
    grid.prevalence.assign(ne * na, 0.0);
    grid.relative_prevalence.assign(ne * na, 0.0);
    grid.prevalence_std.assign(ne * na, 0.0);

    DiffusionParams params{config.eta, config.lambda};
    const std::uint64_t shared_seed = config.master_seed;  // one eta: all cells share runs

    // the no-intervention curve is phi-independent; resolve it once
    std::vector<double> ctx_times(na, 0.0);
    if (!is_prebunk) {
        auto curve = no_intervention_curve(
            graph, params, config.seed_node, config.ctx_resolve_runs,
            mix_seed(config.master_seed, kCtxResolveStream), config.ctx_time_resolution,
            config.threads);
        for (std::size_t j = 0; j < na; ++j) ctx_times[j] = ctx_time_from_curve(curve, grid.axis2[j]);
    }

    double baseline = 0.0;
    const std::size_t cells = ne * na;
    parallel_for_index(static_cast<std::int64_t>(cells + 1), config.threads,
                       [&](std::int64_t flat) {
        if (static_cast<std::size_t>(flat) == cells) {
            baseline = run_cell(graph, params, InterventionPlan{}, config.seed_node,
                                std::nullopt, config.runs, shared_seed)
                           .mean;
            return;
        }
        const std::size_t i = static_cast<std::size_t>(flat) / na;
        const std::size_t j = static_cast<std::size_t>(flat) % na;
        auto plan = plan_for(config.kind, grid.axis1[i], config,
                             is_prebunk ? grid.axis2[j] : config.delta_pre,
                             is_prebunk ? config.phi_ctx : grid.axis2[j]);
        std::optional<double> ctx_time;
        if (!is_prebunk) ctx_time = ctx_times[j];
        auto stats =
            run_cell(graph, params, plan, config.seed_node, ctx_time, config.runs, shared_seed);
        grid.prevalence[grid.index(i, j)] = stats.mean;
        grid.prevalence_std[grid.index(i, j)] = stats.std;
    });

    for (auto& cell : grid.relative_prevalence) cell = 0.0;
    for (std::size_t i = 0; i < ne; ++i)
        for (std::size_t j = 0; j < na; ++j)
            grid.relative_prevalence[grid.index(i, j)] =
                grid.prevalence[grid.index(i, j)] / baseline;
    return grid;
}

TargetingResult targeting_differentials(const DirectedGraph& graph,
                                        const TargetingConfig& config) {
    check_grids(config.eps_grid, config.delta_grid);

    TargetingResult result;
    result.eps_grid = config.eps_grid;
    result.delta_grid = config.delta_grid;
    const std::size_t ne = config.eps_grid.size();
    const std::size_t nd = config.delta_grid.size();
    result.rho_random.assign(ne * nd, 0.0);

    DiffusionParams params{config.eta, config.lambda};
    const std::uint64_t shared_seed = config.master_seed;

    auto run_strategy = [&](TargetStrategy strategy) {
        std::vector<double> rho(ne * nd, 0.0);
        parallel_for_index(static_cast<std::int64_t>(ne * nd), config.threads,
                           [&](std::int64_t flat) {
            const std::size_t i = static_cast<std::size_t>(flat) / nd;
            const std::size_t j = static_cast<std::size_t>(flat) % nd;
            InterventionPlan plan;
            plan.prebunk = PrebunkSpec{config.eps_grid[i], config.delta_grid[j], strategy,
                                       config.target_seed, config.fix_targets};
            rho[static_cast<std::size_t>(flat)] =
                run_cell(graph, params, plan, config.seed_node, std::nullopt, config.runs,
                         shared_seed)
                    .mean;
        });
        return rho;
    };

    result.rho_random = run_strategy(TargetStrategy::Random);
    for (TargetStrategy strategy : config.strategies) {
        if (strategy == TargetStrategy::Random) continue;  // the baseline itself
        StrategyDifferential diff;
        diff.strategy = strategy;
        diff.rho = run_strategy(strategy);
        diff.delta_rho.resize(diff.rho.size());
        for (std::size_t k = 0; k < diff.rho.size(); ++k)
            diff.delta_rho[k] = result.rho_random[k] - diff.rho[k];
        result.differentials.push_back(std::move(diff));
    }
    return result;
}

ScenarioSet combined_scenarios(const DirectedGraph& graph, std::span<const Scenario> scenarios,
                               const ScenarioConfig& config) {
    if (config.runs < 1) throw ValidationError("runs must be >= 1");

    ScenarioSet set;
    set.runs = config.runs;

    // baselines and contextualization curves cached per parameter pair
    std::map<std::pair<double, double>, std::vector<double>> baseline_runs;
    std::map<std::pair<double, double>, PrevalenceCurve> curves;

    auto baseline_for = [&](const DiffusionParams& params) -> const std::vector<double>& {
        auto key = std::make_pair(params.eta, params.lambda);
        auto it = baseline_runs.find(key);
        if (it != baseline_runs.end()) return it->second;
        std::vector<double> prev(static_cast<std::size_t>(config.runs));
        parallel_for_index(config.runs, config.threads, [&](std::int64_t r) {
            prev[static_cast<std::size_t>(r)] =
                simulate(graph, params, InterventionPlan{}, config.seed_node, std::nullopt,
                         mix_seed(config.master_seed, static_cast<std::uint64_t>(r)))
                    .final_prevalence;
        });
        return baseline_runs.emplace(key, std::move(prev)).first->second;
    };
    auto curve_for = [&](const DiffusionParams& params) -> const PrevalenceCurve& {
        auto key = std::make_pair(params.eta, params.lambda);
        auto it = curves.find(key);
        if (it != curves.end()) return it->second;
        auto curve = no_intervention_curve(graph, params, config.seed_node,
                                           config.ctx_resolve_runs,
                                           mix_seed(config.master_seed, kCtxResolveStream),
                                           config.ctx_time_resolution, config.threads);
        return curves.emplace(key, std::move(curve)).first->second;
    };

    for (const auto& scenario : scenarios) {
        scenario.params.validate();
        scenario.plan.validate();

        std::optional<double> ctx_time;
        if (scenario.plan.contextualize && scenario.plan.contextualize->phi)
            ctx_time = ctx_time_from_curve(curve_for(scenario.params),
                                           *scenario.plan.contextualize->phi);

        const auto& baseline = baseline_for(scenario.params);
        std::vector<double> prev(static_cast<std::size_t>(config.runs));
        parallel_for_index(config.runs, config.threads, [&](std::int64_t r) {
            prev[static_cast<std::size_t>(r)] =
                simulate(graph, scenario.params, scenario.plan, config.seed_node, ctx_time,
                         mix_seed(config.master_seed, static_cast<std::uint64_t>(r)))
                    .final_prevalence;
        });

        ScenarioResult res;
        res.name = scenario.name;
        res.per_run_relative.resize(static_cast<std::size_t>(config.runs));
        double prev_sum = 0.0, rel_sum = 0.0, rel_sq = 0.0;
        for (int r = 0; r < config.runs; ++r) {
            const double rel = prev[static_cast<std::size_t>(r)] /
                               baseline[static_cast<std::size_t>(r)];
            res.per_run_relative[static_cast<std::size_t>(r)] = rel;
            prev_sum += prev[static_cast<std::size_t>(r)];
            rel_sum += rel;
            rel_sq += rel * rel;
        }
        res.mean_prevalence = prev_sum / config.runs;
        res.mean_relative = rel_sum / config.runs;
        if (config.runs > 1) {
            double var = (rel_sq - config.runs * res.mean_relative * res.mean_relative) /
                         (config.runs - 1);
            res.relative_std = std::sqrt(std::max(0.0, var));
        }
        set.results.push_back(std::move(res));
    }
    return set;
}

std::vector<Scenario> paper_scenarios() {
    const DiffusionParams params{0.026, 0.25};
    struct Setting {
        std::string name;
        double eps_bump;
        double delta;
        double phi;
    };
    const Setting settings[] = {
        {"baseline", 0.0, 0.2, 0.8},
        {"stronger", 0.1, 0.2, 0.8},
        {"wider", 0.0, 0.3, 0.7},
        {"stronger-wider", 0.1, 0.3, 0.7},
    };

    std::vector<Scenario> scenarios;
    for (const auto& s : settings) {
        const double e_nud = 0.143 + s.eps_bump;
        const double e_pre = 0.204 + s.eps_bump;
        const double e_ctx = 0.342 + s.eps_bump;
        const PrebunkSpec prebunk{e_pre, s.delta, TargetStrategy::Random, 1, false};
        const ContextualizeSpec ctx{e_ctx, s.phi, std::nullopt};

        InterventionPlan none, nudge, pre, context, combined;
        nudge.nudge = NudgeSpec{e_nud};
        pre.prebunk = prebunk;
        context.contextualize = ctx;
        combined.nudge = NudgeSpec{e_nud};
        combined.prebunk = prebunk;
        combined.contextualize = ctx;

        scenarios.push_back({s.name + "/none", params, none});
        scenarios.push_back({s.name + "/nudge", params, nudge});
        scenarios.push_back({s.name + "/prebunk", params, pre});
        scenarios.push_back({s.name + "/contextualize", params, context});
        scenarios.push_back({s.name + "/combined", params, combined});
    }
    return scenarios;
}

DirectedGraph make_scale_free_graph(NodeId node_count, int edges_per_node,
                                    std::uint64_t rng_seed) {
    if (node_count < 3) throw ValidationError("scale-free generator needs at least 3 nodes");
    if (edges_per_node < 1) throw ValidationError("edges_per_node must be >= 1");

    SplitMix64 rng(rng_seed);
    std::vector<std::pair<NodeId, NodeId>> edges;

    const NodeId core = std::min<NodeId>(node_count, edges_per_node + 1);
    for (NodeId v = 0; v < core; ++v) edges.emplace_back(v, (v + 1) % core);

    // bag of candidate sources; each node appears once at birth plus once
    // per out-edge gained, so draws are proportional to out-degree + 1
    std::vector<NodeId> bag;
    for (NodeId v = 0; v < core; ++v) {
        bag.push_back(v);
        bag.push_back(v);  // one out-edge each from the core cycle
    }

    for (NodeId v = core; v < node_count; ++v) {
        for (int k = 0; k < edges_per_node; ++k) {
            NodeId w = bag[rng.next_below(bag.size())];
            edges.emplace_back(w, v);  // hubs accumulate out-edges
            bag.push_back(w);
        }
        // one outgoing edge keeps the new node able to transmit and the
        // graph weakly connected with nontrivial cycles
        NodeId x = static_cast<NodeId>(rng.next_below(static_cast<std::uint64_t>(v)));
        edges.emplace_back(v, x);
        bag.push_back(v);  // birth entry
        bag.push_back(v);  // the out-edge just gained
    }

    return DirectedGraph::from_edges(node_count, std::move(edges));
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw ValidationError("grid needs at least one point");
    std::vector<double> grid(static_cast<std::size_t>(count));
    if (count == 1) {
        grid[0] = lo;
        return grid;
    }
    for (int i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return grid;
}

std::vector<double> logspace(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > 0.0)) throw ValidationError("logspace needs positive bounds");
    auto grid = linspace(std::log(lo), std::log(hi), count);
    for (auto& x : grid) x = std::exp(x);
    return grid;
}

} // namespace ctic
