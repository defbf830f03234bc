// Command-line front end: reproducible experiment runs plus single-operation
// subcommands (solve, bounds, simulate). Results land as CSV/JSON files under
// the chosen output directory.

#include "gossip/experiments.hpp"
#include "gossip/errors.hpp"
#include "gossip/graph.hpp"
#include "gossip/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace gossip;
namespace fs = std::filesystem;

Eigen::VectorXd read_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ModelError("cannot open vector file: " + path);
    std::vector<double> vals;
    double v;
    while (in >> v) vals.push_back(v);
    return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Eigen::VectorXd make_z(const RgsModel& model, const std::string& z_file, double z_lo, double z_hi,
                       std::uint64_t seed) {
    if (!z_file.empty()) {
        Eigen::VectorXd z = read_vector(z_file);
        if (z.size() != model.n_s)
            throw ModelError("stubborn opinion file must hold exactly n_s values");
        return z;
    }
    return draw_uniform_vector(model.n_s, z_lo, z_hi, stubborn_seed(seed));
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out << text;
}

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config JSON");
    cmd->add_option("--seed,-s", opts.seed, "base seed");
    cmd->add_option("--trials,-k", opts.trials, "trial count");
    cmd->add_option("--threads,-t", opts.threads, "worker threads");
    cmd->add_option("--out,-o", opts.out_dir, "output directory");
}

ExperimentConfig build_config(const CommonOpts& opts, const std::string& experiment) {
    ExperimentConfig cfg = opts.config_path.empty() ? ExperimentConfig{}
                                                    : ExperimentConfig::from_file(opts.config_path);
    if (cfg.experiment.empty()) cfg.experiment = experiment;
    if (cfg.experiment != experiment)
        throw ModelError("config is for experiment '" + cfg.experiment + "', not '" + experiment +
                         "'");
    if (opts.seed) cfg.base_seed = *opts.seed;
    if (opts.trials) cfg.trials = *opts.trials;
    if (opts.threads) cfg.threads = *opts.threads;
    if (opts.out_dir) cfg.output_dir = *opts.out_dir;
    return cfg;
}

int run_and_write(const ExperimentConfig& cfg) {
    const ExperimentResult res = run_experiment(cfg);
    res.write(cfg.output_dir);
    std::cout << res.summary.dump(2) << "\n";
    std::cerr << "wrote " << cfg.output_dir << " (manifest " << res.manifest_hash << ")\n";
    return res.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gossip opinion dynamics over random graphs: simulation, solves, "
                 "concentration bounds, and reproducible experiments"};
    app.require_subcommand(1);

    CommonOpts scaling_opts, profile_opts, timeavg_opts, mc_opts;
    double profile_gamma = -1.0;
    int profile_c21 = -1, profile_c22 = -1;
    bool scaling_large = false;

    auto* scaling = app.add_subcommand("scaling", "deviation between sampled and expected "
                                                  "solutions across network sizes");
    add_common(scaling, scaling_opts);
    scaling->add_flag("--include-n-10000", scaling_large, "add the n=10000 grid point");

    auto* profile = app.add_subcommand("sbm_profile", "block-model opinion profiles");
    add_common(profile, profile_opts);
    profile->add_option("--gamma", profile_gamma, "stubborn link exponent");
    profile->add_option("--c21", profile_c21, "community 2 -> stubborn 1 switch (0/1)");
    profile->add_option("--c22", profile_c22, "community 2 -> stubborn 2 switch (0/1)");

    auto* timeavg = app.add_subcommand("time_average", "time-averaged opinions and their "
                                                       "concentration radius");
    add_common(timeavg, timeavg_opts);
    double timeavg_gamma = -1.0;
    std::int64_t timeavg_tmax = -1;
    timeavg->add_option("--gamma", timeavg_gamma, "stubborn link exponent");
    timeavg->add_option("--t-max", timeavg_tmax, "steps to simulate");

    auto* mc = app.add_subcommand("mc_concentration", "Monte-Carlo check of the opinion "
                                                      "concentration bound");
    add_common(mc, mc_opts);

    // single-operation subcommands
    std::string model_path, z_file, x0_file, out_dir = "out";
    double z_lo = 0.0, z_hi = 1.0;
    std::uint64_t op_seed = 1;
    bool use_expected = false;
    std::int64_t sim_steps = 10000;

    auto* solve = app.add_subcommand("solve", "expected final opinions for one model");
    solve->add_option("--model,-m", model_path, "model JSON")->required();
    solve->add_option("--z", z_file, "stubborn opinions, one value per line");
    solve->add_option("--z-lo", z_lo, "uniform draw lower end");
    solve->add_option("--z-hi", z_hi, "uniform draw upper end");
    solve->add_option("--seed,-s", op_seed, "seed (graph sampling and z draw)");
    solve->add_flag("--expected", use_expected, "solve over the expected graph");
    solve->add_option("--out,-o", out_dir, "output directory");

    auto* bounds_cmd = app.add_subcommand("bounds", "closed-form concentration bounds for one model");
    int bounds_case = 1;
    bounds_cmd->add_option("--model,-m", model_path, "model JSON")->required();
    bounds_cmd->add_option("--case", bounds_case, "hypothesis case, 1 or 2")
        ->check(CLI::IsMember({1, 2}));
    bounds_cmd->add_option("--out,-o", out_dir, "output directory");

    auto* simulate = app.add_subcommand("simulate", "run the gossip process on one sampled graph");
    simulate->add_option("--model,-m", model_path, "model JSON")->required();
    simulate->add_option("--steps,-n", sim_steps, "number of interactions");
    simulate->add_option("--seed,-s", op_seed, "seed");
    simulate->add_option("--z", z_file, "stubborn opinions file");
    simulate->add_option("--z-lo", z_lo, "uniform draw lower end");
    simulate->add_option("--z-hi", z_hi, "uniform draw upper end");
    simulate->add_option("--x0", x0_file, "initial opinions file");
    simulate->add_flag("--expected", use_expected, "simulate over the expected graph");
    simulate->add_option("--out,-o", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scaling->parsed()) {
            ExperimentConfig cfg = build_config(scaling_opts, "scaling");
            if (scaling_large) cfg.parameters["include_n_10000"] = true;
            return run_and_write(cfg);
        }
        if (profile->parsed()) {
            ExperimentConfig cfg = build_config(profile_opts, "sbm_profile");
            if (profile_gamma > 0) cfg.parameters["gamma"] = profile_gamma;
            if (profile_c21 >= 0) cfg.parameters["c21"] = profile_c21 != 0;
            if (profile_c22 >= 0) cfg.parameters["c22"] = profile_c22 != 0;
            if (!profile_opts.trials && !cfg.parameters.contains("trials")) cfg.trials = 5;
            return run_and_write(cfg);
        }
        if (timeavg->parsed()) {
            ExperimentConfig cfg = build_config(timeavg_opts, "time_average");
            if (timeavg_gamma > 0) cfg.parameters["gamma"] = timeavg_gamma;
            if (timeavg_tmax > 0) cfg.parameters["t_max"] = timeavg_tmax;
            return run_and_write(cfg);
        }
        if (mc->parsed()) {
            ExperimentConfig cfg = build_config(mc_opts, "mc_concentration");
            if (!mc_opts.trials) cfg.trials = std::max(cfg.trials, 100);
            return run_and_write(cfg);
        }

        if (solve->parsed()) {
            const RgsModel model = load_model(model_path);
            const Eigen::VectorXd z = make_z(model, z_file, z_lo, z_hi, op_seed);
            SystemMatrices sys;
            if (use_expected) {
                sys = assemble_system(expected_graph(model));
            } else {
                const SampledGraph g = sample_graph(model, graph_seed(op_seed));
                sys = assemble_system(g);
            }
            const OpinionSolution sol = expected_final_opinions(sys, z);
            const ExpectedUpdate upd = build_expected_update(sys);
            std::ostringstream csv;
            csv << "agent_id,community_id,x_value,kind\n";
            for (int i = 0; i < sol.x.size(); ++i)
                csv << (i + 1) << ",-1," << fmt(sol.x[i]) << ","
                    << (use_expected ? "expected" : "sampled") << "\n";
            write_text(fs::path(out_dir) / "solution.csv", csv.str());
            nlohmann::json diag;
            diag["lambda_min_m"] = sol.lambda_min_m;
            diag["rho_qbar"] = spectral_radius_qbar(upd);
            diag["residual"] = sol.solver_residual;
            diag["alpha"] = sys.alpha;
            write_text(fs::path(out_dir) / "diagnostics.json", diag.dump(2) + "\n");
            std::cout << diag.dump(2) << "\n";
            return 0;
        }
        if (bounds_cmd->parsed()) {
            const RgsModel model = load_model(model_path);
            const DegreeSummary ds = degree_summary(model);
            const SystemMatrices sys_star = assemble_system(expected_graph(model));
            const double lambda1 = lambda_min_sym(sys_star.m_bar);
            const BoundReport rep =
                bound_report(ds, lambda1, sys_star.alpha, model.n(),
                             bounds_case == 1 ? BoundCase::stubborn_min_degree
                                              : BoundCase::spectral);
            write_text(fs::path(out_dir) / "bounds.json", rep.to_json() + "\n");
            std::cout << rep.to_json() << "\n";
            return rep.vacuous ? 2 : 0;
        }
        if (simulate->parsed()) {
            const RgsModel model = load_model(model_path);
            const Eigen::VectorXd z = make_z(model, z_file, z_lo, z_hi, op_seed);
            Eigen::VectorXd x0;
            if (!x0_file.empty()) {
                x0 = read_vector(x0_file);
                if (x0.size() != model.n_r)
                    throw ModelError("initial opinion file must hold exactly n_r values");
            } else {
                x0 = draw_uniform_vector(model.n_r, 0.0, 1.0, opinion_seed(op_seed));
            }
            InteractionTable table;
            fs::create_directories(out_dir);
            if (use_expected) {
                table = make_interaction_table(expected_graph(model));
            } else {
                const SampledGraph g = sample_graph(model, graph_seed(op_seed));
                export_edge_list(g, (fs::path(out_dir) / "graph.edges").string());
                table = make_interaction_table(g);
            }
            GossipTrajectory traj = init_trajectory(x0, z, derive_seed(op_seed, 0x74726AULL));
            run(traj, table, sim_steps);
            write_text(fs::path(out_dir) / "trajectory.csv", trajectory_csv(traj));
            write_text(fs::path(out_dir) / "time_average.csv", time_average_csv(traj));
            write_text(fs::path(out_dir) / "checkpoint.json", checkpoint_json(traj) + "\n");
            std::cerr << "wrote " << out_dir << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
