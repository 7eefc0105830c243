#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ctic/diffusion.hpp"
#include "ctic/graph.hpp"

namespace ctic {

struct CascadeEvent {
    std::string node_id;     // external id on the cascade's own network
    double timestamp_hours;  // relative to cascade start
};

/// One empirical resharing cascade; events sorted by timestamp, the root is
/// the earliest event.
struct CascadeRecord {
    std::string cascade_id;
    std::vector<CascadeEvent> events;
};

/// CSV loader, columns "cascade_id,node_id,timestamp_hours" (header optional).
/// Events are sorted per cascade; negative timestamps are rejected.
std::vector<CascadeRecord> load_cascades_csv(const std::filesystem::path& path);

/// Keep cascades whose event count within `within_hours` of their first
/// event reaches `min_size`.
std::vector<CascadeRecord> filter_cascades(std::vector<CascadeRecord> cascades,
                                           int min_size, double within_hours);

/// Mean cumulative event count across cascades at each grid time, counting
/// the root and measuring time from each cascade's first event.
std::vector<double> empirical_mean_curve(std::span<const CascadeRecord> cascades,
                                         std::span<const double> time_grid);

/// A simulated cascade in CascadeRecord form (activated nodes with their
/// activation times). Used by the fitting round-trip checks.
CascadeRecord cascade_from_result(const DirectedGraph& graph, const SimulationResult& result,
                                  std::string cascade_id);

struct FitResult {
    double eta_hat = 0.0;
    double lambda_hat = 0.0;
    double loss = 0.0;
    std::vector<double> eta_grid;
    std::vector<double> lambda_grid;
    std::vector<double> loss_surface;  // row-major [eta][lambda]

    double surface_at(std::size_t i, std::size_t j) const {
        return loss_surface[i * lambda_grid.size() + j];
    }
};

struct FitConfig {
    std::vector<double> eta_grid;     // empty -> default_eta_grid()
    std::vector<double> lambda_grid;  // empty -> default_lambda_grid()
    double loss_window_hours = 48.0;
    double loss_grid_step = 1.0;
    int runs_per_cell = 50;
    std::uint64_t master_seed = 0;
    int threads = 1;
};

/// Calibration grids: eta 0.002..0.060 step 0.002, lambda 0.05..1.00 step
/// 0.05 (brackets the expected optimum with headroom).
std::vector<double> default_eta_grid();
std::vector<double> default_lambda_grid();

/// Grid-search fit of (eta, lambda): per cell, the Monte Carlo mean
/// cumulative activation count from the max-out-degree seed is compared to
/// the empirical mean cumulative count on a uniform grid over
/// [0, loss_window_hours] under the Euclidean (L2) distance. Ties break by
/// smaller eta, then smaller lambda. Deterministic given master_seed.
FitResult fit_diffusion_params(const DirectedGraph& graph,
                               std::span<const CascadeRecord> cascades,
                               const FitConfig& config);

enum class SurveyCondition { Control, Treatment };

struct SurveyRecord {
    std::string item_id;
    std::string participant_id;
    SurveyCondition condition = SurveyCondition::Control;
    double response = 0.0;
    double scale_min = 0.0;
    double scale_max = 1.0;
};

/// CSV loader, columns "item_id,participant_id,condition,response,
/// scale_min,scale_max" with condition in {control, treatment}.
std::vector<SurveyRecord> load_survey_csv(const std::filesystem::path& path);

struct ItemSuppression {
    std::string item_id;
    double control_mean = 0.0;    // of responses rescaled to [0, 1]
    double treatment_mean = 0.0;
    double suppression_rate = 0.0;  // (control - treatment) / control
};

struct ExcludedItem {
    std::string item_id;
    double control_mean = 0.0;
};

struct StrengthEstimate {
    std::vector<ItemSuppression> per_item;   // retained items, input order
    double mean_epsilon = 0.0;               // unweighted mean of retained rates
    std::vector<ExcludedItem> excluded_items;
};

/// Per-item suppression rates e(a) = (mean control - mean treatment) /
/// mean control on responses linearly rescaled to [0, 1]; items whose
/// control mean falls below `control_floor` are excluded (the ratio is
/// unstable there). Negative rates are retained, not clamped.
StrengthEstimate estimate_intervention_strength(std::span<const SurveyRecord> records,
                                                double control_floor = 0.10);

} // namespace ctic
