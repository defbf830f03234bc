#include "gossip/errors.hpp"
#include "gossip/experiments.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gossip;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExperimentConfig small_scaling_config() {
    ExperimentConfig cfg;
    cfg.experiment = "scaling";
    cfg.base_seed = 31337;
    cfg.trials = 2;
    cfg.parameters["n_grid"] = {60, 90};
    cfg.parameters["c_s"] = 0.2;
    return cfg;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("float formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, -0.0, 2.5e17}) {
        const std::string s = fmt(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(fmt(1.0) == "1");
}

TEST_CASE("uniform benchmark model") {
    const RgsModel m = uniform_link_model(1000, 0.1);
    CHECK(m.n_s == 100);
    CHECK(m.n_r == 900);
    const double ln = std::log(1000.0);
    CHECK(m.psi_r(0, 1) == doctest::Approx(ln * ln / 1000.0).epsilon(1e-14));
    CHECK(m.psi_s(0, 0) == m.psi_r(0, 1));
    CHECK_THROWS_AS(uniform_link_model(100, 0.7), ModelError);
}

TEST_CASE("five-block labels partition the agents") {
    const auto labels = five_block_labels(3, 2);
    CHECK(labels.size() == 13);
    CHECK(labels[0] == 0);
    CHECK(labels[3] == 1);
    CHECK(labels[8] == 2);
    CHECK(labels[9] == 3);  // first stubborn community
    CHECK(labels[12] == 4);
}

TEST_CASE("five-block degree summary at full size") {
    // middle community detached: the overall minimum stubborn degree vanishes
    // while the attached communities keep 100 p3
    const RgsModel m = five_block_model(600, 100, 2.0, 1.1, 2.0, false, false);
    const DegreeSummary ds = degree_summary(m);
    const double p3 = std::pow(std::log(2000.0), 2.0) / 2000.0;
    CHECK(ds.delta_rs_min == 0.0);
    CHECK(ds.delta_rs_min_pos == doctest::Approx(100.0 * p3).epsilon(1e-12));
    CHECK(ds.n_r1 == 1200);
    CHECK(ds.n_r2 == 600);
    CHECK(ds.delta_rs_max == doctest::Approx(100.0 * p3).epsilon(1e-12));
    CHECK(ds.delta_sr_max == doctest::Approx(600.0 * p3).epsilon(1e-12));
}

TEST_CASE("stubborn opinion ranges") {
    const Eigen::VectorXd z = draw_block_stubborn_opinions(50, 4);
    CHECK(z.head(50).minCoeff() >= 0.9);
    CHECK(z.head(50).maxCoeff() <= 1.0);
    CHECK(z.tail(50).minCoeff() >= 0.0);
    CHECK(z.tail(50).maxCoeff() <= 0.1);
}

TEST_CASE("scaling experiment basics") {
    SUBCASE("single grid point yields one row per trial") {
        ExperimentConfig cfg;
        cfg.experiment = "scaling";
        cfg.trials = 1;
        cfg.parameters["n_grid"] = {80};
        cfg.parameters["c_s"] = 0.2;
        const ExperimentResult res = run_scaling(cfg);
        const std::string& table = res.tables.front().second;
        CHECK(std::count(table.begin(), table.end(), '\n') == 2); // header + 1 row
        CHECK(res.summary.at("eps_star_first").size() == 1);
    }
    SUBCASE("gate columns are always present") {
        const ExperimentResult res = run_scaling(small_scaling_config());
        CHECK(res.tables.front().second.find("gate_case1") != std::string::npos);
        CHECK(res.tables.front().second.find("gate_case2") != std::string::npos);
    }
}

TEST_CASE("byte-identical reruns") {
    const ExperimentConfig cfg = small_scaling_config();
    const ExperimentResult a = run_scaling(cfg);
    const ExperimentResult b = run_scaling(cfg);
    CHECK(a.manifest_hash == b.manifest_hash);
    REQUIRE(a.tables.size() == b.tables.size());
    for (std::size_t i = 0; i < a.tables.size(); ++i)
        CHECK(a.tables[i].second == b.tables[i].second);
    CHECK(a.summary.dump() == b.summary.dump());

    // and through the filesystem
    const fs::path dir_a = fs::temp_directory_path() / "gossip_rerun_a";
    const fs::path dir_b = fs::temp_directory_path() / "gossip_rerun_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    a.write(dir_a.string());
    b.write(dir_b.string());
    CHECK(slurp(dir_a / "scaling.csv") == slurp(dir_b / "scaling.csv"));
    CHECK(slurp(dir_a / "manifest.json") == slurp(dir_b / "manifest.json"));
    CHECK(slurp(dir_a / "scaling.csv").rfind("# manifest-hash=" + a.manifest_hash, 0) == 0);
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("seed changes flow into the manifest hash") {
    ExperimentConfig cfg = small_scaling_config();
    const std::string h1 = run_scaling(cfg).manifest_hash;
    cfg.base_seed += 1;
    const std::string h2 = run_scaling(cfg).manifest_hash;
    CHECK(h1 != h2);
}

TEST_CASE("thread count does not change results") {
    ExperimentConfig cfg;
    cfg.experiment = "mc_concentration";
    cfg.trials = 6;
    cfg.base_seed = 8;
    cfg.model_spec = nlohmann::json{{"uniform", {{"n", 80}, {"c_s", 0.2}}}};
    cfg.threads = 1;
    const ExperimentResult a = run_mc_concentration(cfg);
    cfg.threads = 4;
    const ExperimentResult b = run_mc_concentration(cfg);
    CHECK(a.tables.front().second == b.tables.front().second);
    CHECK(a.manifest_hash == b.manifest_hash);
}

TEST_CASE("block-model profile at reduced size") {
    ExperimentConfig cfg;
    cfg.experiment = "sbm_profile";
    cfg.trials = 2;
    cfg.base_seed = 5;
    cfg.parameters["n_r1"] = 300;
    cfg.parameters["n_s1"] = 50;
    cfg.parameters["gamma"] = 3.0;
    const ExperimentResult res = run_sbm_profile(cfg);

    CHECK(res.summary.contains("regime"));
    CHECK(res.summary.contains("ratios"));
    const auto& stats = res.summary.at("trial_stats");
    REQUIRE(stats.size() == 2);
    // within-community expected-graph opinions are constant
    for (const auto& t : stats)
        for (double spread : t.at("spread_xstar").get<std::vector<double>>())
            CHECK(spread < 1e-8);
    // polarization direction: community 1 above community 3
    CHECK(stats[0].at("mean_xstar")[0].get<double>() > stats[0].at("mean_xstar")[2].get<double>());
}

TEST_CASE("time-average run at reduced size") {
    ExperimentConfig cfg;
    cfg.experiment = "time_average";
    cfg.trials = 2;
    cfg.base_seed = 6;
    cfg.parameters["n_r1"] = 120;
    cfg.parameters["n_s1"] = 20;
    cfg.parameters["gamma"] = 2.5;
    cfg.parameters["t_max"] = 20000;
    cfg.parameters["checkpoints"] = {0, 100, 1000, 20000}; // zero must be dropped
    const ExperimentResult res = run_time_average(cfg);

    const std::string& cp = res.tables.front().second;
    CHECK(cp.rfind("trial,t,", 0) == 0);
    CHECK(cp.find("\n0,0,") == std::string::npos); // no t = 0 checkpoint
    CHECK(cp.find("\n0,100,") != std::string::npos);
    CHECK(res.summary.at("trial_stats").size() == 2);
    CHECK(res.summary.contains("bounds"));
    CHECK(res.summary.at("worst_rms_xg").get<double>() < 0.5);

    // histogram table carries explicit bin edges
    bool found_hist = false;
    for (const auto& [name, csv] : res.tables)
        if (name == "histogram") {
            found_hist = true;
            CHECK(csv.rfind("trial,bin_lo,bin_hi,count\n", 0) == 0);
        }
    CHECK(found_hist);
}

TEST_CASE("mc experiment marks vacuous runs with exit code 2") {
    ExperimentConfig cfg;
    cfg.experiment = "mc_concentration";
    cfg.trials = 4;
    cfg.base_seed = 9;
    cfg.model_spec = nlohmann::json{{"uniform", {{"n", 60}, {"c_s", 0.2}}}};
    const ExperimentResult res = run_mc_concentration(cfg);
    CHECK(res.summary.at("vacuous").get<bool>());
    CHECK(res.exit_code == 2);
    CHECK(res.summary.at("covered").get<bool>());
}

TEST_CASE("config parsing") {
    const auto doc = nlohmann::json::parse(R"({
        "experiment": "scaling",
        "seeds": {"base": 77, "trials": 3},
        "parameters": {"n_grid": [50, 70], "c_s": 0.25},
        "output_dir": "results"
    })");
    const ExperimentConfig cfg = ExperimentConfig::from_json(doc);
    CHECK(cfg.experiment == "scaling");
    CHECK(cfg.base_seed == 77);
    CHECK(cfg.trials == 3);
    CHECK(cfg.output_dir == "results");
    CHECK(cfg.parameters.at("c_s").get<double>() == 0.25);
    CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(
                        R"({"experiment": "scaling", "seeds": {"trials": 0}})")),
                    ModelError);
    CHECK_THROWS_AS(run_experiment(ExperimentConfig::from_json(
                        nlohmann::json::parse(R"({"experiment": "unknown"})"))),
                    ModelError);
}

} // TEST_SUITE
