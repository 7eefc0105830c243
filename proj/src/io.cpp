#include "ctic/io.hpp"

#include <cstdio>
#include <fstream>

#include "ctic/error.hpp"

namespace ctic {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json params_to_json(const DiffusionParams& params) {
    return json{{"eta", params.eta}, {"lambda", params.lambda}};
}

DiffusionParams params_from_json(const json& j) {
    DiffusionParams params;
    params.eta = j.at("eta").get<double>();
    params.lambda = j.at("lambda").get<double>();
    params.validate();
    return params;
}

json plan_to_json(const InterventionPlan& plan) {
    json j = json::object();
    if (plan.nudge) j["nudge"] = {{"epsilon", plan.nudge->epsilon}};
    if (plan.prebunk) {
        j["prebunk"] = {{"epsilon", plan.prebunk->epsilon},
                        {"delta", plan.prebunk->delta},
                        {"strategy", to_string(plan.prebunk->strategy)},
                        {"rng_seed", plan.prebunk->rng_seed},
                        {"fix_targets", plan.prebunk->fix_targets}};
    }
    if (plan.contextualize) {
        json c = {{"epsilon", plan.contextualize->epsilon}};
        if (plan.contextualize->phi) c["phi"] = *plan.contextualize->phi;
        if (plan.contextualize->explicit_time) c["time"] = *plan.contextualize->explicit_time;
        j["contextualize"] = c;
    }
    return j;
}

InterventionPlan plan_from_json(const json& j) {
    InterventionPlan plan;
    if (j.contains("nudge")) plan.nudge = NudgeSpec{j.at("nudge").at("epsilon").get<double>()};
    if (j.contains("prebunk")) {
        const auto& p = j.at("prebunk");
        PrebunkSpec spec;
        spec.epsilon = p.at("epsilon").get<double>();
        spec.delta = p.at("delta").get<double>();
        if (p.contains("strategy"))
            spec.strategy = target_strategy_from_string(p.at("strategy").get<std::string>());
        if (p.contains("rng_seed")) spec.rng_seed = p.at("rng_seed").get<std::uint64_t>();
        if (p.contains("fix_targets")) spec.fix_targets = p.at("fix_targets").get<bool>();
        plan.prebunk = spec;
    }
    if (j.contains("contextualize")) {
        const auto& c = j.at("contextualize");
        ContextualizeSpec spec;
        spec.epsilon = c.at("epsilon").get<double>();
        if (c.contains("phi")) spec.phi = c.at("phi").get<double>();
        if (c.contains("time")) spec.explicit_time = c.at("time").get<double>();
        plan.contextualize = spec;
    }
    plan.validate();
    return plan;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write output file: " + path.string());
    return out;
}

} // namespace

void write_activation_csv(const DirectedGraph& graph, const SimulationResult& result,
                          const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "node_id,time\n";
    for (NodeId v = 0; v < graph.node_count(); ++v) {
        double t = result.activation_time[static_cast<std::size_t>(v)];
        if (t != kNeverActivated)
            out << graph.external_id(v) << ',' << fmt_double(t) << '\n';
    }
}

void write_curve_csv(const SimulationResult& result, NodeId node_count,
                     const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "time,active_fraction\n";
    for (const auto& p : result.curve)
        out << fmt_double(p.time) << ','
            << fmt_double(static_cast<double>(p.active_count) / node_count) << '\n';
}

json simulation_summary_json(const DirectedGraph& graph, const DiffusionParams& params,
                             const InterventionPlan& plan, NodeId seed_node,
                             const SimulationResult& result) {
    return json{{"params", params_to_json(params)},
                {"plan", plan_to_json(plan)},
                {"seed_node", graph.external_id(seed_node)},
                {"node_count", graph.node_count()},
                {"active_count", result.active_count()},
                {"final_prevalence", result.final_prevalence}};
}

json monte_carlo_summary_json(const DirectedGraph& graph, const DiffusionParams& params,
                              const InterventionPlan& plan, NodeId seed_node,
                              const MonteCarloSummary& summary) {
    return json{{"params", params_to_json(params)},
                {"plan", plan_to_json(plan)},
                {"seed_node", graph.external_id(seed_node)},
                {"node_count", graph.node_count()},
                {"runs", summary.runs},
                {"mean_prevalence", summary.mean_prevalence},
                {"prevalence_std", summary.prevalence_std}};
}

void write_mean_curve_csv(const MonteCarloSummary& summary, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "time,active_fraction\n";
    for (std::size_t g = 0; g < summary.time_grid.size(); ++g)
        out << fmt_double(summary.time_grid[g]) << ','
            << fmt_double(summary.mean_active_fraction[g]) << '\n';
}

void write_sweep_csv(const SweepGrid& grid, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << grid.axis1_name << ',' << grid.axis2_name
        << ",prevalence,relative_prevalence,std\n";
    for (std::size_t i = 0; i < grid.axis1.size(); ++i)
        for (std::size_t j = 0; j < grid.axis2.size(); ++j) {
            const std::size_t k = grid.index(i, j);
            out << fmt_double(grid.axis1[i]) << ',' << fmt_double(grid.axis2[j]) << ','
                << fmt_double(grid.prevalence[k]) << ','
                << fmt_double(grid.relative_prevalence[k]) << ','
                << fmt_double(grid.prevalence_std[k]) << '\n';
        }
}

void write_targeting_csv(const TargetingResult& result, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "strategy,epsilon,delta,rho_random,rho,delta_rho\n";
    for (const auto& diff : result.differentials)
        for (std::size_t i = 0; i < result.eps_grid.size(); ++i)
            for (std::size_t j = 0; j < result.delta_grid.size(); ++j) {
                const std::size_t k = i * result.delta_grid.size() + j;
                out << to_string(diff.strategy) << ',' << fmt_double(result.eps_grid[i]) << ','
                    << fmt_double(result.delta_grid[j]) << ','
                    << fmt_double(result.rho_random[k]) << ',' << fmt_double(diff.rho[k])
                    << ',' << fmt_double(diff.delta_rho[k]) << '\n';
            }
}

void write_scenarios_csv(const ScenarioSet& set, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "scenario,mean_prevalence,mean_relative_prevalence,relative_std\n";
    for (const auto& r : set.results)
        out << r.name << ',' << fmt_double(r.mean_prevalence) << ','
            << fmt_double(r.mean_relative) << ',' << fmt_double(r.relative_std) << '\n';
}

json scenarios_json(const ScenarioSet& set) {
    json results = json::array();
    for (const auto& r : set.results)
        results.push_back({{"name", r.name},
                           {"mean_prevalence", r.mean_prevalence},
                           {"mean_relative_prevalence", r.mean_relative},
                           {"relative_std", r.relative_std},
                           {"per_run_relative", r.per_run_relative}});
    return json{{"runs", set.runs}, {"scenarios", results}};
}

void write_critical_curve_csv(const CriticalCurve& curve, const std::string& axis_name,
                              const std::filesystem::path& path) {
    auto out = open_out(path);
    out << axis_name << ",critical_epsilon\n";
    for (std::size_t i = 0; i < curve.axis.size(); ++i) {
        out << fmt_double(curve.axis[i]) << ',';
        if (curve.critical_epsilon[i]) out << fmt_double(*curve.critical_epsilon[i]);
        out << '\n';
    }
}

json spectral_report_json(const SpectralReport& report) {
    return json{{"spectral_radius", report.spectral_radius},
                {"iterations", report.iterations},
                {"converged", report.converged},
                {"residual", report.residual}};
}

json fit_result_json(const FitResult& fit) {
    return json{{"eta_hat", fit.eta_hat},
                {"lambda_hat", fit.lambda_hat},
                {"loss", fit.loss},
                {"eta_grid", fit.eta_grid},
                {"lambda_grid", fit.lambda_grid}};
}

void write_loss_surface_csv(const FitResult& fit, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "eta,lambda,loss\n";
    for (std::size_t i = 0; i < fit.eta_grid.size(); ++i)
        for (std::size_t j = 0; j < fit.lambda_grid.size(); ++j)
            out << fmt_double(fit.eta_grid[i]) << ',' << fmt_double(fit.lambda_grid[j]) << ','
                << fmt_double(fit.surface_at(i, j)) << '\n';
}

json strength_estimate_json(const StrengthEstimate& estimate) {
    json per_item = json::array();
    for (const auto& item : estimate.per_item)
        per_item.push_back({{"item_id", item.item_id},
                            {"control_mean", item.control_mean},
                            {"treatment_mean", item.treatment_mean},
                            {"suppression_rate", item.suppression_rate}});
    json excluded = json::array();
    for (const auto& item : estimate.excluded_items)
        excluded.push_back({{"item_id", item.item_id}, {"control_mean", item.control_mean}});
    return json{{"mean_epsilon", estimate.mean_epsilon},
                {"per_item", per_item},
                {"excluded_items", excluded}};
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot digest missing file: " + path.string());
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001B3ULL;
        }
    }
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    return std::string("fnv1a64:") + hex;
}

} // namespace ctic
