#include "ctic/calibration.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ctic/error.hpp"
#include "ctic/parallel.hpp"
#include "ctic/rng.hpp"

namespace ctic {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(context + ": not a number: \"" + s + "\"");
    }
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<CascadeRecord> load_cascades_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open cascade file: " + path.string());

    std::vector<CascadeRecord> cascades;
    std::map<std::string, std::size_t> index;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_csv_line(t);
        if (line_no == 1 && fields.size() >= 1 && trim(fields[0]) == "cascade_id") continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 3)
            throw ParseError(where + ": expected cascade_id,node_id,timestamp_hours");
        double ts = parse_double(trim(fields[2]), where);
        if (ts < 0.0) throw ValidationError(where + ": negative timestamp");
        std::string cid = trim(fields[0]);
        auto [it, inserted] = index.emplace(cid, cascades.size());
        if (inserted) cascades.push_back({cid, {}});
        cascades[it->second].events.push_back({trim(fields[1]), ts});
    }
    for (auto& c : cascades)
        std::stable_sort(c.events.begin(), c.events.end(),
                         [](const CascadeEvent& a, const CascadeEvent& b) {
                             return a.timestamp_hours < b.timestamp_hours;
                         });
    return cascades;
}

std::vector<CascadeRecord> filter_cascades(std::vector<CascadeRecord> cascades,
                                           int min_size, double within_hours) {
    if (min_size < 1) throw ValidationError("min_size must be positive");
    if (!(within_hours > 0.0)) throw ValidationError("within_hours must be positive");
    auto removed = std::remove_if(cascades.begin(), cascades.end(), [&](const CascadeRecord& c) {
        if (c.events.empty()) return true;
        const double cutoff = c.events.front().timestamp_hours + within_hours;
        std::int64_t count = 0;
        for (const auto& e : c.events) {
            if (e.timestamp_hours > cutoff) break;
            ++count;
        }
        return count < min_size;
    });
    cascades.erase(removed, cascades.end());
    return cascades;
}

std::vector<double> empirical_mean_curve(std::span<const CascadeRecord> cascades,
                                         std::span<const double> time_grid) {
    if (cascades.empty()) throw ValidationError("no cascades to average");
    if (!std::is_sorted(time_grid.begin(), time_grid.end()))
        throw ValidationError("time grid must be ascending");

    std::vector<double> mean(time_grid.size(), 0.0);
    for (const auto& c : cascades) {
        if (c.events.empty()) throw ValidationError("cascade " + c.cascade_id + " has no events");
        const double start = c.events.front().timestamp_hours;
        std::size_t ei = 0;
        std::int64_t count = 0;
        for (std::size_t g = 0; g < time_grid.size(); ++g) {
            while (ei < c.events.size() &&
                   c.events[ei].timestamp_hours - start <= time_grid[g]) {
                ++count;
                ++ei;
            }
            mean[g] += static_cast<double>(count);
        }
    }
    for (auto& m : mean) m /= static_cast<double>(cascades.size());
    return mean;
}

CascadeRecord cascade_from_result(const DirectedGraph& graph, const SimulationResult& result,
                                  std::string cascade_id) {
    CascadeRecord record{std::move(cascade_id), {}};
    std::vector<std::pair<double, NodeId>> activated;
    for (NodeId v = 0; v < graph.node_count(); ++v) {
        double t = result.activation_time[static_cast<std::size_t>(v)];
        if (t != kNeverActivated) activated.emplace_back(t, v);
    }
    std::sort(activated.begin(), activated.end());
    record.events.reserve(activated.size());
    for (const auto& [t, v] : activated) record.events.push_back({graph.external_id(v), t});
    return record;
}

std::vector<double> default_eta_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 30; ++i) grid.push_back(0.002 * i);
    return grid;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);
    return grid;
}

FitResult fit_diffusion_params(const DirectedGraph& graph,
                               std::span<const CascadeRecord> cascades,
                               const FitConfig& config) {
    FitResult fit;
    fit.eta_grid = config.eta_grid.empty() ? default_eta_grid() : config.eta_grid;
    fit.lambda_grid = config.lambda_grid.empty() ? default_lambda_grid() : config.lambda_grid;
    if (config.runs_per_cell < 1) throw ValidationError("runs_per_cell must be >= 1");
    if (!(config.loss_window_hours > 0.0) || !(config.loss_grid_step > 0.0))
        throw ValidationError("loss window and grid step must be positive");

    std::vector<double> grid_times;
    for (double t = 0.0; t <= config.loss_window_hours + 1e-9; t += config.loss_grid_step)
        grid_times.push_back(t);

    const auto empirical = empirical_mean_curve(cascades, grid_times);

    // §4.1.2-style seed: largest out-degree, ties by ascending id
    NodeId fit_seed = 0;
    for (NodeId v = 1; v < graph.node_count(); ++v)
        if (graph.out_degree(v) > graph.out_degree(fit_seed)) fit_seed = v;

    const std::size_t cells = fit.eta_grid.size() * fit.lambda_grid.size();
    fit.loss_surface.assign(cells, 0.0);
    const auto n_lambda = fit.lambda_grid.size();

    parallel_for_index(static_cast<std::int64_t>(cells), config.threads, [&](std::int64_t cell) {
        const std::size_t i = static_cast<std::size_t>(cell) / n_lambda;
        const std::size_t j = static_cast<std::size_t>(cell) % n_lambda;
        DiffusionParams params{fit.eta_grid[i], fit.lambda_grid[j]};
        const std::uint64_t cell_seed = mix_seed(mix_seed(config.master_seed, i), j);

        // mean cumulative activation count at each grid time
        std::vector<double> sim(grid_times.size(), 0.0);
        for (int r = 0; r < config.runs_per_cell; ++r) {
            auto res = simulate(graph, params, InterventionPlan{}, fit_seed, std::nullopt,
                                mix_seed(cell_seed, static_cast<std::uint64_t>(r)));
            std::size_t ci = 0;
            std::int64_t count = 0;
            for (std::size_t g = 0; g < grid_times.size(); ++g) {
                while (ci < res.curve.size() && res.curve[ci].time <= grid_times[g])
                    count = res.curve[ci++].active_count;
                sim[g] += static_cast<double>(count);
            }
        }
        double sq = 0.0;
        for (std::size_t g = 0; g < grid_times.size(); ++g) {
            const double d = sim[g] / config.runs_per_cell - empirical[g];
            sq += d * d;
        }
        fit.loss_surface[static_cast<std::size_t>(cell)] = std::sqrt(sq);
    });

    std::size_t best = 0;
    for (std::size_t cell = 1; cell < cells; ++cell)
        if (fit.loss_surface[cell] < fit.loss_surface[best]) best = cell;
    fit.eta_hat = fit.eta_grid[best / n_lambda];
    fit.lambda_hat = fit.lambda_grid[best % n_lambda];
    fit.loss = fit.loss_surface[best];
    return fit;
}

std::vector<SurveyRecord> load_survey_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open survey file: " + path.string());

    std::vector<SurveyRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_csv_line(t);
        if (line_no == 1 && fields.size() >= 1 && trim(fields[0]) == "item_id") continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 6)
            throw ParseError(where +
                             ": expected item_id,participant_id,condition,response,"
                             "scale_min,scale_max");
        SurveyRecord rec;
        rec.item_id = trim(fields[0]);
        rec.participant_id = trim(fields[1]);
        const std::string cond = trim(fields[2]);
        if (cond == "control")
            rec.condition = SurveyCondition::Control;
        else if (cond == "treatment")
            rec.condition = SurveyCondition::Treatment;
        else
            throw ParseError(where + ": condition must be control or treatment, got \"" +
                             cond + "\"");
        rec.response = parse_double(trim(fields[3]), where);
        rec.scale_min = parse_double(trim(fields[4]), where);
        rec.scale_max = parse_double(trim(fields[5]), where);
        if (!(rec.scale_max > rec.scale_min))
            throw ValidationError(where + ": scale_max must exceed scale_min");
        if (rec.response < rec.scale_min || rec.response > rec.scale_max)
            throw ValidationError(where + ": response outside the declared scale");
        records.push_back(std::move(rec));
    }
    return records;
}

StrengthEstimate estimate_intervention_strength(std::span<const SurveyRecord> records,
                                                double control_floor) {
    struct ItemAccum {
        double control_sum = 0.0;
        double treatment_sum = 0.0;
        std::int64_t control_n = 0;
        std::int64_t treatment_n = 0;
    };
    std::vector<std::string> order;
    std::map<std::string, ItemAccum> items;
    for (const auto& rec : records) {
        auto [it, inserted] = items.emplace(rec.item_id, ItemAccum{});
        if (inserted) order.push_back(rec.item_id);
        const double z = (rec.response - rec.scale_min) / (rec.scale_max - rec.scale_min);
        if (rec.condition == SurveyCondition::Control) {
            it->second.control_sum += z;
            ++it->second.control_n;
        } else {
            it->second.treatment_sum += z;
            ++it->second.treatment_n;
        }
    }

    StrengthEstimate estimate;
    double rate_sum = 0.0;
    for (const auto& id : order) {
        const auto& acc = items.at(id);
        if (acc.control_n == 0 || acc.treatment_n == 0)
            throw ValidationError("item " + id + " lacks a control or treatment condition");
        const double c = acc.control_sum / acc.control_n;
        const double t = acc.treatment_sum / acc.treatment_n;
        if (c < control_floor) {
            estimate.excluded_items.push_back({id, c});
            continue;
        }
        const double e = (c - t) / c;
        estimate.per_item.push_back({id, c, t, e});
        rate_sum += e;
    }
    if (estimate.per_item.empty())
        throw ValidationError("no survey item passes the control-mean floor");
    estimate.mean_epsilon = rate_sum / static_cast<double>(estimate.per_item.size());
    return estimate;
}

} // namespace ctic
