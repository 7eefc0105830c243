#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ctic/calibration.hpp"
#include "ctic/diffusion.hpp"
#include "ctic/experiments.hpp"
#include "ctic/graph.hpp"
#include "ctic/interventions.hpp"
#include "ctic/qmf.hpp"

namespace ctic {

using json = nlohmann::json;

/// Round-trip-safe decimal rendering of a double ("%.17g").
std::string fmt_double(double x);

json params_to_json(const DiffusionParams& params);
DiffusionParams params_from_json(const json& j);

json plan_to_json(const InterventionPlan& plan);
InterventionPlan plan_from_json(const json& j);

// ---- result writers (machine-readable outputs live on disk, never stdout)

/// "node_id,time" rows for activated nodes, external ids, hours.
void write_activation_csv(const DirectedGraph& graph, const SimulationResult& result,
                          const std::filesystem::path& path);

/// "time,active_fraction" step points.
void write_curve_csv(const SimulationResult& result, NodeId node_count,
                     const std::filesystem::path& path);

json simulation_summary_json(const DirectedGraph& graph, const DiffusionParams& params,
                             const InterventionPlan& plan, NodeId seed_node,
                             const SimulationResult& result);

json monte_carlo_summary_json(const DirectedGraph& graph, const DiffusionParams& params,
                              const InterventionPlan& plan, NodeId seed_node,
                              const MonteCarloSummary& summary);

/// "time,active_fraction" of the Monte Carlo mean curve.
void write_mean_curve_csv(const MonteCarloSummary& summary, const std::filesystem::path& path);

/// Long-format grid: axis1,axis2,prevalence,relative_prevalence,std.
void write_sweep_csv(const SweepGrid& grid, const std::filesystem::path& path);

/// strategy,epsilon,delta,rho_random,rho,delta_rho rows.
void write_targeting_csv(const TargetingResult& result, const std::filesystem::path& path);

void write_scenarios_csv(const ScenarioSet& set, const std::filesystem::path& path);
json scenarios_json(const ScenarioSet& set);

/// axis,critical_epsilon rows; the epsilon field is empty where no
/// eps <= 1 reaches criticality.
void write_critical_curve_csv(const CriticalCurve& curve, const std::string& axis_name,
                              const std::filesystem::path& path);

json spectral_report_json(const SpectralReport& report);

json fit_result_json(const FitResult& fit);
void write_loss_surface_csv(const FitResult& fit, const std::filesystem::path& path);

json strength_estimate_json(const StrengthEstimate& estimate);

void write_json_file(const json& j, const std::filesystem::path& path);

/// FNV-1a 64-bit content digest, "fnv1a64:<hex>"; manifests use it to tie a
/// run to its exact inputs.
std::string file_digest(const std::filesystem::path& path);

} // namespace ctic
