#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempTree {
    fs::path root;

    TempTree() {
        root = fs::temp_directory_path() /
               ("ctic_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(root);
    }
    ~TempTree() { fs::remove_all(root); }

    fs::path write(const std::string& name, const std::string& content) const {
        fs::path p = root / name;
        std::ofstream out(p);
        out << content;
        return p;
    }
    fs::path dir(const std::string& name) const {
        fs::path p = root / name;
        fs::create_directories(p);
        return p;
    }
};

int run(std::vector<std::string> args, std::string* err = nullptr) {
    std::vector<const char*> argv{"ctic"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream captured;
    auto* old = std::cerr.rdbuf(captured.rdbuf());
    int code = ctic::run_cli(static_cast<int>(argv.size()), argv.data());
    std::cerr.rdbuf(old);
    if (err) *err = captured.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

TempTree& tiny_graph_tree() {
    static TempTree tree;
    static bool initialized = [] {
        tree.write("edges.txt", "a b\nb c\na c\n");
        tree.write("sus.txt", "a 1.0\nb 0.5\nc 0.5\n");
        return true;
    }();
    (void)initialized;
    return tree;
}

std::string sim_config(const TempTree& t, const std::string& extra = "") {
    return std::string("{\n") +
           "  \"graph\": {\"edges\": \"" + (t.root / "edges.txt").string() +
           "\", \"susceptibility\": \"" + (t.root / "sus.txt").string() + "\"},\n" +
           "  \"params\": {\"eta\": 1.0, \"lambda\": 0.25},\n" +
           "  \"seed_node\": \"auto\",\n  \"rng_seed\": 7\n" + extra + "}\n";
}

} // namespace

TEST_CASE("simulate writes activation, curve, summary and manifest") {
    auto& t = tiny_graph_tree();
    auto cfg = t.write("sim.json", sim_config(t));
    auto out = t.dir("out_sim");

    CHECK(run({"simulate", "--config", cfg.string(), "--out", out.string()}) == 0);

    auto activation = slurp(out / "activation.csv");
    const int rows = count_lines(activation) - 1;  // header
    CHECK(rows >= 1);
    CHECK(rows <= 3);
    CHECK(activation.find("a,0") != std::string::npos);
    CHECK(fs::exists(out / "curve.csv"));

    auto summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary.at("seed_node") == "a");
    CHECK(summary.at("final_prevalence").get<double>() >= 1.0 / 3);

    auto manifest = json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("command") == "simulate");
    CHECK(manifest.at("inputs").size() == 2);
    for (const auto& [path, digest] : manifest.at("inputs").items())
        CHECK(digest.get<std::string>().rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("missing graph file exits with code 2") {
    auto& t = tiny_graph_tree();
    auto cfg = t.write("missing.json",
                       "{\"graph\": {\"edges\": \"/nonexistent/edges.txt\"},"
                       " \"params\": {\"eta\": 0.5, \"lambda\": 1}}");
    std::string err;
    CHECK(run({"simulate", "--config", cfg.string(), "--out", (t.root / "o").string()}, &err) ==
          2);
    CHECK(err.find("not found") != std::string::npos);
}

TEST_CASE("reruns of the same config produce byte-identical result files") {
    auto& t = tiny_graph_tree();
    auto cfg = t.write("rerun.json", sim_config(t));
    auto out1 = t.dir("rerun1");
    auto out2 = t.dir("rerun2");
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", out1.string()}) == 0);
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", out2.string()}) == 0);
    for (const char* name : {"activation.csv", "curve.csv", "summary.json"})
        CHECK(slurp(out1 / name) == slurp(out2 / name));
}

TEST_CASE("--set overrides reach the engine") {
    auto& t = tiny_graph_tree();
    auto cfg = t.write("override.json", sim_config(t));
    auto out = t.dir("out_override");
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", out.string(), "--set",
                 "params.eta=0.0"}) == 0);
    auto summary = json::parse(slurp(out / "summary.json"));
    CHECK(summary.at("active_count") == 1);  // only the seed
}

TEST_CASE("unknown preset lists the available presets and exits 2") {
    auto& t = tiny_graph_tree();
    std::string err;
    CHECK(run({"sweep", "--preset", "nope", "--out", (t.root / "x").string()}, &err) == 2);
    CHECK(err.find("paper-fig3-nudge-desk") != std::string::npos);
    CHECK(err.find("paper-fig6-desk") != std::string::npos);
}

TEST_CASE("sweep preset runs after desk-scale overrides; manifests differ, digests match") {
    auto& t = tiny_graph_tree();
    auto cfg = t.write("sweep_graph.json",
                       "{\"graph\": {\"edges\": \"" + (t.root / "edges.txt").string() +
                           "\", \"susceptibility\": \"" + (t.root / "sus.txt").string() +
                           "\"}, \"seed_node\": \"auto\"}");
    auto out1 = t.dir("sweep1");
    auto out2 = t.dir("sweep2");
    std::vector<std::string> base{"sweep",  "--preset", "paper-fig3-nudge-desk",
                                  "--config", cfg.string(), "--set",
                                  "runs=5",  "--set",    "eps_grid=[0.0,0.5,1.0]",
                                  "--set",   "axis2_grid=[0.3,0.8]"};
    {
        auto args = base;
        args.insert(args.end(), {"--out", out1.string()});
        REQUIRE(run(args) == 0);
    }
    {
        auto args = base;
        args.insert(args.end(), {"--set", "kind=prebunk", "--out", out2.string()});
        REQUIRE(run(args) == 0);
    }
    auto sweep = slurp(out1 / "sweep.csv");
    CHECK(count_lines(sweep) == 1 + 3 * 2);
    CHECK(sweep.rfind("epsilon,eta", 0) == 0);

    auto m1 = json::parse(slurp(out1 / "manifest.json"));
    auto m2 = json::parse(slurp(out2 / "manifest.json"));
    CHECK(m1.at("config") != m2.at("config"));
    CHECK(m1.at("inputs") == m2.at("inputs"));
    CHECK(m1.at("preset_provenance") == "artifact-default");
}

TEST_CASE("qmf subcommand: spectral radius and critical curves") {
    TempTree t;
    t.write("dag.txt", "a b\nb c\na c\n");
    t.write("cycle.txt", "a b\nb a\n");
    t.write("ones.txt", "a 1\nb 1\nc 1\n");
    t.write("ones2.txt", "a 1\nb 1\n");

    auto dag_cfg = t.write("qmf_dag.json",
                           "{\"graph\": {\"edges\": \"" + (t.root / "dag.txt").string() +
                               "\", \"susceptibility\": \"" + (t.root / "ones.txt").string() +
                               "\"}, \"mode\": \"spectral-radius\", \"eta\": 0.9}");
    auto out = t.dir("qmf_dag");
    REQUIRE(run({"qmf", "--config", dag_cfg.string(), "--out", out.string()}) == 0);
    auto report = json::parse(slurp(out / "spectral.json"));
    CHECK(report.at("spectral_radius") == 0.0);
    CHECK(report.at("converged") == true);

    auto cyc_cfg = t.write("qmf_cyc.json",
                           "{\"graph\": {\"edges\": \"" + (t.root / "cycle.txt").string() +
                               "\", \"susceptibility\": \"" + (t.root / "ones2.txt").string() +
                               "\"}, \"mode\": \"spectral-radius\", \"eta\": 0.5}");
    auto out2 = t.dir("qmf_cyc");
    REQUIRE(run({"qmf", "--config", cyc_cfg.string(), "--out", out2.string()}) == 0);
    auto cyc = json::parse(slurp(out2 / "spectral.json"));
    CHECK(std::abs(cyc.at("spectral_radius").get<double>() - 0.5) < 1e-7);

    // complete 3-digraph, Lambda0 = 2: eta 0.4 subcritical, 0.8 -> 0.375, 1.0 -> 0.5
    t.write("k3.txt", "a b\nb a\na c\nc a\nb c\nc b\n");
    auto curve_cfg = t.write("qmf_curve.json",
                             "{\"graph\": {\"edges\": \"" + (t.root / "k3.txt").string() +
                                 "\", \"susceptibility\": \"" + (t.root / "ones.txt").string() +
                                 "\"}, \"mode\": \"nudge-curve\","
                                 " \"eta_grid\": [0.4, 0.8, 1.0]}");
    auto out3 = t.dir("qmf_curve");
    REQUIRE(run({"qmf", "--config", curve_cfg.string(), "--out", out3.string()}) == 0);
    std::istringstream curve(slurp(out3 / "nudge_critical.csv"));
    std::string line;
    std::getline(curve, line);
    CHECK(line == "eta,critical_epsilon");
    std::getline(curve, line);
    CHECK(line.back() == ',');  // subcritical point: empty epsilon field
    std::getline(curve, line);
    CHECK(std::abs(std::stod(line.substr(line.find(',') + 1)) - 0.375) < 1e-6);
    std::getline(curve, line);
    CHECK(std::abs(std::stod(line.substr(line.find(',') + 1)) - 0.5) < 1e-6);
}

TEST_CASE("seed-select records the chosen node") {
    auto& t = tiny_graph_tree();
    auto cfg = t.write("seed.json_cfg", "{\"graph\": {\"edges\": \"" +
                                            (t.root / "edges.txt").string() +
                                            "\", \"susceptibility\": \"" +
                                            (t.root / "sus.txt").string() + "\"}}");
    auto out = t.dir("seed_out");
    REQUIRE(run({"seed-select", "--config", cfg.string(), "--out", out.string()}) == 0);
    auto seed = json::parse(slurp(out / "seed.json"));
    CHECK(seed.at("external_id") == "a");
    CHECK(seed.at("out_degree") == 2);
}

TEST_CASE("calibrate-intervention computes per-item rates from a survey CSV") {
    TempTree t;
    auto survey = t.write("survey.csv",
                          "item_id,participant_id,condition,response,scale_min,scale_max\n"
                          "a,p1,control,0.5,0,1\n"
                          "a,p2,treatment,0.4,0,1\n"
                          "low,p3,control,0.05,0,1\n"
                          "low,p4,treatment,0.01,0,1\n");
    auto cfg = t.write("strength.json_cfg",
                       "{\"survey\": \"" + survey.string() + "\"}");
    auto out = t.dir("strength_out");
    REQUIRE(run({"calibrate-intervention", "--config", cfg.string(), "--out", out.string()}) ==
            0);
    auto estimate = json::parse(slurp(out / "strength.json"));
    CHECK(std::abs(estimate.at("mean_epsilon").get<double>() - 0.2) < 1e-12);
    CHECK(estimate.at("excluded_items").size() == 1);

    auto bad = t.write("bad_survey.csv", "a,p1,maybe,0.5,0,1\n");
    auto bad_cfg = t.write("bad.json_cfg", "{\"survey\": \"" + bad.string() + "\"}");
    std::string err;
    CHECK(run({"calibrate-intervention", "--config", bad_cfg.string(), "--out",
               (t.root / "bad_out").string()},
              &err) == 3);
    CHECK(err.find(":1") != std::string::npos);
}

TEST_CASE("calibrate-diffusion writes a fit and its loss surface") {
    TempTree t;
    t.write("edges.txt", "a b\nb c\nc a\na c\n");
    t.write("sus.txt", "a 1.0\nb 0.8\nc 0.9\n");
    auto cascades = t.write("cascades.csv",
                            "cascade_id,node_id,timestamp_hours\n"
                            "c1,a,0\nc1,b,1\nc1,c,2\n"
                            "c2,a,0\nc2,c,3\n");
    auto cfg = t.write("fit.json_cfg",
                       "{\"graph\": {\"edges\": \"" + (t.root / "edges.txt").string() +
                           "\", \"susceptibility\": \"" + (t.root / "sus.txt").string() +
                           "\"}, \"cascades\": \"" + cascades.string() +
                           "\", \"eta_grid\": [0.2, 0.8], \"lambda_grid\": [0.5],"
                           " \"loss_window_hours\": 6, \"runs_per_cell\": 10,"
                           " \"master_seed\": 4}");
    auto out = t.dir("fit_out");
    REQUIRE(run({"calibrate-diffusion", "--config", cfg.string(), "--out", out.string()}) == 0);
    auto fit = json::parse(slurp(out / "fit.json"));
    CHECK(fit.contains("eta_hat"));
    CHECK(count_lines(slurp(out / "loss_surface.csv")) == 1 + 2);
}

TEST_CASE("scenarios subcommand with the paper preset at desk scale") {
    auto& t = tiny_graph_tree();
    auto cfg = t.write("scen.json",
                       "{\"graph\": {\"edges\": \"" + (t.root / "edges.txt").string() +
                           "\", \"susceptibility\": \"" + (t.root / "sus.txt").string() +
                           "\"}, \"seed_node\": \"auto\"}");
    auto out = t.dir("scen_out");
    REQUIRE(run({"scenarios", "--preset", "paper-fig6-desk", "--config", cfg.string(), "--set",
                 "runs=5", "--set", "ctx.runs=10", "--out", out.string()}) == 0);
    auto results = json::parse(slurp(out / "scenarios.json"));
    CHECK(results.at("scenarios").size() == 20);
    for (const auto& s : results.at("scenarios"))
        if (s.at("name").get<std::string>().find("/none") != std::string::npos)
            CHECK(s.at("mean_relative_prevalence") == 1.0);
}

TEST_CASE("targeting subcommand emits the differential table") {
    auto& t = tiny_graph_tree();
    auto cfg = t.write("targ.json",
                       "{\"graph\": {\"edges\": \"" + (t.root / "edges.txt").string() +
                           "\", \"susceptibility\": \"" + (t.root / "sus.txt").string() +
                           "\"}, \"seed_node\": \"auto\","
                           " \"eps_grid\": [0.0, 0.8], \"delta_grid\": [0.0, 1.0],"
                           " \"params\": {\"eta\": 0.5, \"lambda\": 0.5},"
                           " \"runs\": 10, \"master_seed\": 2}");
    auto out = t.dir("targ_out");
    REQUIRE(run({"targeting", "--config", cfg.string(), "--out", out.string()}) == 0);
    auto table = slurp(out / "targeting.csv");
    CHECK(count_lines(table) == 1 + 3 * 4);  // 3 strategies x 2x2 grid
    CHECK(table.find("degree,") != std::string::npos);
}
