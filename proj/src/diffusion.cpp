#include "ctic/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "ctic/error.hpp"
#include "ctic/parallel.hpp"
#include "ctic/rng.hpp"

namespace ctic {

namespace {

// stream tags for deriving independent sub-seeds from a run seed
constexpr std::uint64_t kEdgeStream = 0xED6EULL;
constexpr std::uint64_t kTargetStream = 0x7A26ULL;

struct Delivery {
    double time;
    NodeId target;
    NodeId source;
    double success_u;  // uniform variate compared against eta * s_v(t)
    double eval_time;  // time at which s_v is read (== time unless scheduling-time mode)
};

// min-heap on (time, target, source); the (target, source) pair is unique
// per event, so pop order is total
struct DeliveryAfter {
    bool operator()(const Delivery& a, const Delivery& b) const {
        if (a.time != b.time) return a.time > b.time;
        if (a.target != b.target) return a.target > b.target;
        return a.source > b.source;
    }
};

} // namespace

void DiffusionParams::validate() const {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw ValidationError("eta must lie in [0, 1]");
    if (!(lambda > 0.0))
        throw ValidationError("lambda must be positive");
}

double SimulationResult::fraction_at(double t, NodeId node_count) const {
    std::int64_t count = 0;
    for (const auto& p : curve) {
        if (p.time > t) break;
        count = p.active_count;
    }
    return static_cast<double>(count) / static_cast<double>(node_count);
}

SimulationResult simulate(const DirectedGraph& graph, const DiffusionParams& params,
                          const InterventionPlan& plan, NodeId seed_node,
                          std::optional<double> ctx_time, std::uint64_t rng_seed,
                          SuccessTiming timing) {
    params.validate();
    plan.validate();
    if (!graph.valid_node(seed_node))
        throw ValidationError("seed node out of range");

    const NodeId n = graph.node_count();

    bool has_ctx = plan.contextualize.has_value();
    double ctx_factor = 1.0;
    double ctx_t = kNeverActivated;
    if (has_ctx) {
        ctx_factor = 1.0 - plan.contextualize->epsilon;
        if (ctx_time)
            ctx_t = *ctx_time;
        else if (plan.contextualize->explicit_time)
            ctx_t = *plan.contextualize->explicit_time;
        else
            throw ValidationError(
                "contextualization by stage phi requires a pre-resolved ctx_time");
        if (!(ctx_t >= 0.0)) throw ValidationError("ctx time must be non-negative");
    }

    // Pre-T effective susceptibility; left-to-right factor order matches
    // effective_susceptibility exactly.
    std::vector<double> pre_t_susc(static_cast<std::size_t>(n));
    {
        std::vector<bool> is_target(static_cast<std::size_t>(n), false);
        if (plan.prebunk) {
            const auto& pb = *plan.prebunk;
            std::uint64_t target_seed = pb.fix_targets
                                            ? pb.rng_seed
                                            : mix_seed(pb.rng_seed,
                                                       mix_seed(rng_seed, kTargetStream));
            std::optional<NodeId> seed_for_targets;
            if (pb.strategy == TargetStrategy::DistanceFromSeed)
                seed_for_targets = seed_node;
            for (NodeId v : resolve_targets(graph, pb.delta, pb.strategy,
                                            seed_for_targets, target_seed))
                is_target[static_cast<std::size_t>(v)] = true;
        }
        const double nud = plan.nudge ? 1.0 - plan.nudge->epsilon : 1.0;
        const double pre = plan.prebunk ? 1.0 - plan.prebunk->epsilon : 1.0;
        for (NodeId v = 0; v < n; ++v) {
            double s = graph.susceptibility(v);
            if (plan.nudge) s *= nud;
            if (plan.prebunk && is_target[static_cast<std::size_t>(v)]) s *= pre;
            pre_t_susc[static_cast<std::size_t>(v)] = s;
        }
    }

    SimulationResult result;
    result.activation_time.assign(static_cast<std::size_t>(n), kNeverActivated);
    result.activated_by.assign(static_cast<std::size_t>(n), -1);

    std::priority_queue<Delivery, std::vector<Delivery>, DeliveryAfter> queue;

    auto schedule_from = [&](NodeId u, double t_u) {
        const std::int64_t base = graph.out_offset(u);
        auto neighbors = graph.out_neighbors(u);
        for (std::size_t k = 0; k < neighbors.size(); ++k) {
            NodeId v = neighbors[k];
            if (result.activation_time[static_cast<std::size_t>(v)] != kNeverActivated)
                continue;  // one attempt per edge, toward inactive neighbors only
            // Both variates are a pure function of (rng_seed, edge index), so
            // they are identical across plans sharing rng_seed regardless of
            // activation order.
            SplitMix64 edge_rng(mix_seed(mix_seed(rng_seed, kEdgeStream),
                                         static_cast<std::uint64_t>(base) + k));
            const double u_delay = edge_rng.next_unit();
            const double u_success = edge_rng.next_unit();
            const double delay = -std::log1p(-u_delay) / params.lambda;
            const double t_deliver = t_u + delay;
            queue.push({t_deliver, v, u, u_success,
                        timing == SuccessTiming::DeliveryTime ? t_deliver : t_u});
        }
    };

    result.activation_time[static_cast<std::size_t>(seed_node)] = 0.0;
    result.curve.push_back({0.0, 1});
    schedule_from(seed_node, 0.0);

    std::int64_t active = 1;
    while (!queue.empty()) {
        Delivery ev = queue.top();
        queue.pop();
        if (result.activation_time[static_cast<std::size_t>(ev.target)] != kNeverActivated)
            continue;
        double s = pre_t_susc[static_cast<std::size_t>(ev.target)];
        if (has_ctx && ev.eval_time >= ctx_t) s *= ctx_factor;
        if (ev.success_u < params.eta * s) {
            result.activation_time[static_cast<std::size_t>(ev.target)] = ev.time;
            result.activated_by[static_cast<std::size_t>(ev.target)] = ev.source;
            result.curve.push_back({ev.time, ++active});
            schedule_from(ev.target, ev.time);
        }
    }

    result.final_prevalence = static_cast<double>(active) / static_cast<double>(n);
    return result;
}

MonteCarloSummary monte_carlo(const DirectedGraph& graph, const DiffusionParams& params,
                              const InterventionPlan& plan, NodeId seed_node,
                              std::optional<double> ctx_time, int runs,
                              std::uint64_t master_seed, std::span<const double> time_grid,
                              int threads, std::vector<double>* per_run_prevalence,
                              SuccessTiming timing) {
    if (runs < 1) throw ValidationError("runs must be >= 1");

    const NodeId n = graph.node_count();
    std::vector<double> prevalence(static_cast<std::size_t>(runs));
    std::vector<std::vector<double>> fractions(
        static_cast<std::size_t>(runs), std::vector<double>(time_grid.size(), 0.0));

    parallel_for_index(runs, threads, [&](std::int64_t r) {
        auto res = simulate(graph, params, plan, seed_node, ctx_time,
                            mix_seed(master_seed, static_cast<std::uint64_t>(r)), timing);
        prevalence[static_cast<std::size_t>(r)] = res.final_prevalence;
        auto& f = fractions[static_cast<std::size_t>(r)];
        std::size_t ci = 0;
        std::int64_t count = 0;
        for (std::size_t g = 0; g < time_grid.size(); ++g) {
            while (ci < res.curve.size() && res.curve[ci].time <= time_grid[g])
                count = res.curve[ci++].active_count;
            f[g] = static_cast<double>(count) / static_cast<double>(n);
        }
    });

    MonteCarloSummary summary;
    summary.runs = runs;
    summary.time_grid.assign(time_grid.begin(), time_grid.end());
    summary.mean_active_fraction.assign(time_grid.size(), 0.0);

    double sum = 0.0;
    for (double p : prevalence) sum += p;
    summary.mean_prevalence = sum / runs;
    if (runs > 1) {
        double ss = 0.0;
        for (double p : prevalence) ss += (p - summary.mean_prevalence) * (p - summary.mean_prevalence);
        summary.prevalence_std = std::sqrt(ss / (runs - 1));
    }
    for (std::size_t g = 0; g < time_grid.size(); ++g) {
        double acc = 0.0;
        for (int r = 0; r < runs; ++r) acc += fractions[static_cast<std::size_t>(r)][g];
        summary.mean_active_fraction[g] = acc / runs;
    }

    if (per_run_prevalence) *per_run_prevalence = std::move(prevalence);
    return summary;
}

MonteCarloSummary monte_carlo_uniform_grid(const DirectedGraph& graph,
                                           const DiffusionParams& params,
                                           const InterventionPlan& plan, NodeId seed_node,
                                           std::optional<double> ctx_time, int runs,
                                           std::uint64_t master_seed, double grid_step,
                                           int threads, SuccessTiming timing) {
    if (runs < 1) throw ValidationError("runs must be >= 1");
    if (!(grid_step > 0.0)) throw ValidationError("grid step must be positive");

    const NodeId n = graph.node_count();
    std::vector<std::vector<CurvePoint>> curves(static_cast<std::size_t>(runs));
    std::vector<double> prevalence(static_cast<std::size_t>(runs));

    parallel_for_index(runs, threads, [&](std::int64_t r) {
        auto res = simulate(graph, params, plan, seed_node, ctx_time,
                            mix_seed(master_seed, static_cast<std::uint64_t>(r)), timing);
        prevalence[static_cast<std::size_t>(r)] = res.final_prevalence;
        curves[static_cast<std::size_t>(r)] = std::move(res.curve);
    });

    double horizon = 0.0;
    for (const auto& c : curves)
        if (!c.empty()) horizon = std::max(horizon, c.back().time);
    auto steps = static_cast<std::size_t>(std::ceil(horizon / grid_step)) + 1;

    MonteCarloSummary summary;
    summary.runs = runs;
    summary.time_grid.resize(steps);
    summary.mean_active_fraction.assign(steps, 0.0);
    for (std::size_t g = 0; g < steps; ++g)
        summary.time_grid[g] = static_cast<double>(g) * grid_step;

    for (const auto& c : curves) {
        std::size_t ci = 0;
        std::int64_t count = 0;
        for (std::size_t g = 0; g < steps; ++g) {
            while (ci < c.size() && c[ci].time <= summary.time_grid[g])
                count = c[ci++].active_count;
            summary.mean_active_fraction[g] += static_cast<double>(count) / static_cast<double>(n);
        }
    }
    for (auto& f : summary.mean_active_fraction) f /= runs;

    double sum = 0.0;
    for (double p : prevalence) sum += p;
    summary.mean_prevalence = sum / runs;
    if (runs > 1) {
        double ss = 0.0;
        for (double p : prevalence)
            ss += (p - summary.mean_prevalence) * (p - summary.mean_prevalence);
        summary.prevalence_std = std::sqrt(ss / (runs - 1));
    }
    return summary;
}

PrevalenceCurve no_intervention_curve(const DirectedGraph& graph, const DiffusionParams& params,
                                      NodeId seed_node, int runs, std::uint64_t master_seed,
                                      double time_resolution, int threads) {
    if (runs < 1) throw ValidationError("runs must be >= 1");
    if (!(time_resolution > 0.0)) throw ValidationError("time resolution must be positive");

    const NodeId n = graph.node_count();
    std::vector<std::vector<CurvePoint>> curves(static_cast<std::size_t>(runs));
    std::vector<double> prevalence(static_cast<std::size_t>(runs));

    parallel_for_index(runs, threads, [&](std::int64_t r) {
        auto res = simulate(graph, params, InterventionPlan{}, seed_node, std::nullopt,
                            mix_seed(master_seed, static_cast<std::uint64_t>(r)));
        prevalence[static_cast<std::size_t>(r)] = res.final_prevalence;
        curves[static_cast<std::size_t>(r)] = std::move(res.curve);
    });

    double horizon = 0.0;
    for (const auto& c : curves)
        if (!c.empty()) horizon = std::max(horizon, c.back().time);
    auto steps = static_cast<std::size_t>(std::ceil(horizon / time_resolution)) + 1;

    PrevalenceCurve out;
    out.step = time_resolution;
    out.grid.resize(steps);
    out.mean_fraction.assign(steps, 0.0);
    for (std::size_t g = 0; g < steps; ++g)
        out.grid[g] = static_cast<double>(g) * time_resolution;

    for (const auto& c : curves) {
        std::size_t ci = 0;
        std::int64_t count = 0;
        for (std::size_t g = 0; g < steps; ++g) {
            while (ci < c.size() && c[ci].time <= out.grid[g]) count = c[ci++].active_count;
            out.mean_fraction[g] += static_cast<double>(count) / static_cast<double>(n);
        }
    }
    for (auto& f : out.mean_fraction) f /= runs;

    double sum = 0.0;
    for (double p : prevalence) sum += p;
    out.rho = sum / runs;
    return out;
}

double ctx_time_from_curve(const PrevalenceCurve& curve, double phi) {
    if (!(phi >= 0.0 && phi <= 1.0))
        throw ValidationError("phi must lie in [0, 1]");
    const double threshold = phi * curve.rho;
    // rho_0 = 1/N > 0, so phi = 0 always resolves to T = 0; the epsilon
    // guard absorbs the rounding of the grid-mean at the top end (phi = 1).
    for (std::size_t g = 0; g < curve.grid.size(); ++g)
        if (curve.mean_fraction[g] >= threshold - 1e-12) return curve.grid[g];
    return curve.grid.empty() ? 0.0 : curve.grid.back();
}

double resolve_ctx_time(const DirectedGraph& graph, const DiffusionParams& params,
                        NodeId seed_node, double phi, int runs, std::uint64_t master_seed,
                        double time_resolution, int threads) {
    auto curve =
        no_intervention_curve(graph, params, seed_node, runs, master_seed, time_resolution, threads);
    return ctx_time_from_curve(curve, phi);
}

NodeId select_seed(const DirectedGraph& graph) {
    NodeId best = -1;
    double max_s = 0.0;
    for (NodeId v = 0; v < graph.node_count(); ++v) {
        max_s = std::max(max_s, graph.susceptibility(v));
        if (graph.susceptibility(v) == 1.0) {
            if (best == -1 || graph.out_degree(v) > graph.out_degree(best)) best = v;
        }
    }
    if (best == -1)
        throw SeedSelectionError(
            "no node with susceptibility 1 (maximum present: " + std::to_string(max_s) + ")",
            max_s);
    return best;
}

} // namespace ctic
