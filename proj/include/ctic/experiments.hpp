#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctic/diffusion.hpp"
#include "ctic/graph.hpp"
#include "ctic/interventions.hpp"

namespace ctic {

enum class InterventionKind { Nudge, Prebunk, Contextualize };

std::string to_string(InterventionKind k);
InterventionKind intervention_kind_from_string(const std::string& name);

/// Two-axis prevalence grid. Cells in the same axis2 column share per-run
/// random numbers with each other and with the no-intervention baseline, so
/// the relative prevalence of a strength-0 cell is exactly 1 and prevalence
/// is non-increasing down each strength column run by run.
struct SweepGrid {
    std::string axis1_name;
    std::string axis2_name;
    std::vector<double> axis1;
    std::vector<double> axis2;
    std::vector<double> prevalence;           // row-major [axis1][axis2]
    std::vector<double> relative_prevalence;  // normalized by the eps=0 baseline per column
    std::vector<double> prevalence_std;

    std::size_t index(std::size_t i, std::size_t j) const { return i * axis2.size() + j; }
};

struct SweepConfig {
    InterventionKind kind = InterventionKind::Nudge;
    std::vector<double> strength_grid;  // axis1: epsilon
    std::vector<double> axis2_grid;     // eta (strength-vs-contagiousness) or delta/phi
    double eta = 0.026;                 // fixed eta for scale/timing sweeps
    double lambda = 0.25;
    double delta_pre = 0.2;   // fixed prebunk coverage when axis2 is eta
    double phi_ctx = 0.8;     // fixed contextualization stage when axis2 is eta
    TargetStrategy strategy = TargetStrategy::Random;
    std::uint64_t target_seed = 0;
    bool fix_targets = false;
    NodeId seed_node = 0;
    int runs = 200;
    std::uint64_t master_seed = 0;
    int threads = 1;
    int ctx_resolve_runs = 200;        // dedicated no-intervention batch for T
    double ctx_time_resolution = 0.5;  // hours
};

/// Prevalence over strength x contagiousness; for contextualization the
/// trigger time T is resolved per eta at the fixed phi before the sweep.
SweepGrid sweep_strength_vs_contagiousness(const DirectedGraph& graph, const SweepConfig& config);

/// Prevalence over strength x scale (prebunk) or strength x timing stage
/// (contextualize) at fixed (eta, lambda).
SweepGrid sweep_scale_or_timing(const DirectedGraph& graph, const SweepConfig& config);

struct TargetingConfig {
    std::vector<double> eps_grid;
    std::vector<double> delta_grid;
    std::vector<TargetStrategy> strategies;  // compared against Random
    double eta = 0.026;
    double lambda = 0.25;
    NodeId seed_node = 0;
    std::uint64_t target_seed = 0;
    bool fix_targets = false;
    int runs = 200;
    std::uint64_t master_seed = 0;
    int threads = 1;
};

struct StrategyDifferential {
    TargetStrategy strategy;
    std::vector<double> rho;        // row-major [eps][delta]
    std::vector<double> delta_rho;  // rho_random - rho, same layout
};

struct TargetingResult {
    std::vector<double> eps_grid;
    std::vector<double> delta_grid;
    std::vector<double> rho_random;  // row-major [eps][delta]
    std::vector<StrategyDifferential> differentials;
};

/// Prebunking prevalence differentials relative to random target selection,
/// all strategies evaluated on matched run budgets and shared run seeds.
TargetingResult targeting_differentials(const DirectedGraph& graph, const TargetingConfig& config);

struct Scenario {
    std::string name;
    DiffusionParams params;
    InterventionPlan plan;
};

struct ScenarioResult {
    std::string name;
    double mean_prevalence = 0.0;
    double mean_relative = 0.0;  // mean over runs of (prevalence / paired baseline prevalence)
    double relative_std = 0.0;
    std::vector<double> per_run_relative;
};

struct ScenarioSet {
    int runs = 0;
    std::vector<ScenarioResult> results;
};

struct ScenarioConfig {
    NodeId seed_node = 0;
    int runs = 200;
    std::uint64_t master_seed = 0;
    int threads = 1;
    int ctx_resolve_runs = 200;
    double ctx_time_resolution = 0.5;
};

/// Per-scenario relative prevalence against no-intervention baselines that
/// share the scenario's diffusion parameters and per-run random numbers.
ScenarioSet combined_scenarios(const DirectedGraph& graph, std::span<const Scenario> scenarios,
                               const ScenarioConfig& config);

/// The four published intervention settings, each as {none, nudge, prebunk,
/// contextualize, combined}: (baseline) the empirically estimated strengths
/// eps = (0.143, 0.204, 0.342) with delta = 0.2, phi = 0.8 at
/// (eta, lambda) = (0.026, 0.25); (stronger) every eps + 0.1; (wider)
/// delta + 0.1 and phi - 0.1; (stronger-wider) both adjustments.
std::vector<Scenario> paper_scenarios();

/// Directed preferential-attachment graph with heavy-tailed out-degree, for
/// synthetic experiments and acceptance tests. Susceptibilities unset.
DirectedGraph make_scale_free_graph(NodeId node_count, int edges_per_node,
                                    std::uint64_t rng_seed);

/// Evenly spaced grid helpers used by the preset configurations.
std::vector<double> linspace(double lo, double hi, int count);
std::vector<double> logspace(double lo, double hi, int count);

} // namespace ctic
