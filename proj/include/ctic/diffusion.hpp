#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ctic/graph.hpp"
#include "ctic/interventions.hpp"

namespace ctic {

/// Continuous-time independent-cascade parameters: the transmission
/// probability on edge u->v is eta * s_v, delivery delays are Exp(lambda).
/// Time is measured in hours throughout.
struct DiffusionParams {
    double eta = 0.0;     // contagiousness, dimensionless in [0, 1]
    double lambda = 1.0;  // delay rate, 1/hours

    void validate() const;
};

inline constexpr double kNeverActivated = std::numeric_limits<double>::infinity();

struct CurvePoint {
    double time = 0.0;
    std::int64_t active_count = 0;
};

struct SimulationResult {
    std::vector<double> activation_time;  // kNeverActivated where inactive
    std::vector<NodeId> activated_by;     // -1 for the seed and inactive nodes
    double final_prevalence = 0.0;        // active count / node count
    std::vector<CurvePoint> curve;        // step points, starts at (0, 1)

    std::int64_t active_count() const { return curve.empty() ? 0 : curve.back().active_count; }
    /// Active fraction at time t (step-function evaluation).
    double fraction_at(double t, NodeId node_count) const;
};

/// Whether the transmission Bernoulli reads the target's susceptibility at
/// delivery time (default; a contextualization note appearing at T affects
/// transmissions still in flight) or at scheduling time.
enum class SuccessTiming { DeliveryTime, SchedulingTime };

/// One event-driven CTIC run. When node u activates at t_u, exactly one
/// delivery is scheduled per out-edge to a then-inactive neighbor v, at
/// t_u + Exp(lambda); the delivery succeeds iff a per-edge uniform variate
/// falls below eta * s_v(t). Both variates are keyed on (rng_seed, edge
/// index), so runs sharing rng_seed across plans use common random numbers
/// and intervention dominance holds per run, not merely in expectation.
///
/// `ctx_time` must carry the resolved trigger time T when the plan
/// contextualizes by diffusion stage phi (see resolve_ctx_time).
SimulationResult simulate(const DirectedGraph& graph, const DiffusionParams& params,
                          const InterventionPlan& plan, NodeId seed_node,
                          std::optional<double> ctx_time, std::uint64_t rng_seed,
                          SuccessTiming timing = SuccessTiming::DeliveryTime);

struct MonteCarloSummary {
    int runs = 0;
    double mean_prevalence = 0.0;
    double prevalence_std = 0.0;  // sample std; 0 when runs == 1
    std::vector<double> time_grid;
    std::vector<double> mean_active_fraction;
};

/// `runs` independent simulations with per-run seeds mix_seed(master_seed,
/// run index); the aggregation order is fixed by run index, so results do
/// not depend on thread count. Per-run final prevalences are exported via
/// `per_run_prevalence` when non-null.
MonteCarloSummary monte_carlo(const DirectedGraph& graph, const DiffusionParams& params,
                              const InterventionPlan& plan, NodeId seed_node,
                              std::optional<double> ctx_time, int runs,
                              std::uint64_t master_seed, std::span<const double> time_grid,
                              int threads = 1,
                              std::vector<double>* per_run_prevalence = nullptr,
                              SuccessTiming timing = SuccessTiming::DeliveryTime);

/// monte_carlo with a uniform time grid of step `grid_step` spanning the
/// observed horizon (last event across runs).
MonteCarloSummary monte_carlo_uniform_grid(const DirectedGraph& graph,
                                           const DiffusionParams& params,
                                           const InterventionPlan& plan, NodeId seed_node,
                                           std::optional<double> ctx_time, int runs,
                                           std::uint64_t master_seed, double grid_step,
                                           int threads = 1,
                                           SuccessTiming timing = SuccessTiming::DeliveryTime);

/// No-intervention mean prevalence curve on a uniform grid, for resolving
/// contextualization times. `rho` is the mean final prevalence.
struct PrevalenceCurve {
    double rho = 0.0;
    double step = 0.0;
    std::vector<double> grid;
    std::vector<double> mean_fraction;
};

PrevalenceCurve no_intervention_curve(const DirectedGraph& graph, const DiffusionParams& params,
                                      NodeId seed_node, int runs, std::uint64_t master_seed,
                                      double time_resolution, int threads = 1);

/// Earliest grid time where the mean curve reaches phi * rho.
double ctx_time_from_curve(const PrevalenceCurve& curve, double phi);

/// Stage-matched contextualization time T(eta, phi): the first grid time at
/// which the mean no-intervention prevalence reaches phi times its final
/// value. Resolved once from a dedicated no-intervention batch and then
/// frozen for every interventional run at this (params, seed, phi).
double resolve_ctx_time(const DirectedGraph& graph, const DiffusionParams& params,
                        NodeId seed_node, double phi, int runs, std::uint64_t master_seed,
                        double time_resolution, int threads = 1);

/// The scenario seed: among nodes with susceptibility exactly 1, the one of
/// maximal out-degree (ties by ascending id). Throws SeedSelectionError
/// carrying the maximal susceptibility present when no node qualifies.
NodeId select_seed(const DirectedGraph& graph);

} // namespace ctic
