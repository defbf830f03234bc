#include "gossip/experiments.hpp"
#include "gossip/errors.hpp"
#include "gossip/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace gossip {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTrialTag = 0x747269616CULL;
constexpr std::uint64_t kGraphTag = 0x6772617068ULL;
constexpr std::uint64_t kOpinionTag = 0x78300A0AULL;
constexpr std::uint64_t kStubbornTag = 0x7A730A0AULL;

void parallel_trials(int trials, int threads, const std::function<void(int)>& body) {
    const int workers = std::max(1, std::min(threads, trials));
    if (workers == 1) {
        for (int k = 0; k < trials; ++k) body(k);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    auto loop = [&]() {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= trials) return;
            body(k);
        }
    };
    for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& th : pool) th.join();
}

double param_or(const json& params, const char* key, double fallback) {
    return params.contains(key) ? params.at(key).get<double>() : fallback;
}

int param_or_int(const json& params, const char* key, int fallback) {
    return params.contains(key) ? params.at(key).get<int>() : fallback;
}

bool param_or_bool(const json& params, const char* key, bool fallback) {
    return params.contains(key) ? params.at(key).get<bool>() : fallback;
}

double slope_of(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Sample a graph whose solve is well-posed, retrying with derived seeds.
SampledGraph sample_solvable(const RgsModel& model, std::uint64_t seed, int max_extra,
                             int& attempts) {
    for (int a = 0; a <= max_extra; ++a) {
        const std::uint64_t s = a == 0 ? seed : derive_seed(seed, 0x72657472ULL, a);
        SampledGraph g = sample_graph(model, s);
        attempts = a + 1;
        if (stubborn_reachability(g).all_touch_stubborn() && g.edge_count() > 0)
            return g;
    }
    throw SingularError("no solvable sample after " + std::to_string(max_extra + 1) +
                        " attempts; some component never touches a stubborn agent");
}

/// Reusable factorization for repeated solves against one matrix.
struct Factored {
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    explicit Factored(const Eigen::MatrixXd& m) : ldlt(m) {
        const double max_diag = std::max(m.diagonal().maxCoeff(), 1.0);
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < 1e-12 * max_diag)
            throw SingularError("expected system matrix is singular");
    }
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return ldlt.solve(b); }
};

struct CommunityStats {
    double mean = 0.0;
    double spread = 0.0; // max - min
};

CommunityStats community_stats(const Eigen::VectorXd& x, const std::vector<int>& labels,
                               int community) {
    CommunityStats st;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < x.size(); ++i) {
        if (labels[i] != community) continue;
        sum += x[i];
        lo = std::min(lo, x[i]);
        hi = std::max(hi, x[i]);
        ++count;
    }
    if (count > 0) {
        st.mean = sum / count;
        st.spread = hi - lo;
    }
    return st;
}

} // namespace

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

std::uint64_t trial_seed(std::uint64_t base, int grid_index, int trial) {
    return derive_seed(derive_seed(base, kTrialTag, grid_index), trial);
}
std::uint64_t graph_seed(std::uint64_t trial) { return derive_seed(trial, kGraphTag); }
std::uint64_t opinion_seed(std::uint64_t trial) { return derive_seed(trial, kOpinionTag); }
std::uint64_t stubborn_seed(std::uint64_t trial) { return derive_seed(trial, kStubbornTag); }

RgsModel uniform_link_model(int n, double c_s, double psi) {
    if (n < 3)
        throw ModelError("uniform model needs at least 3 agents");
    if (!(c_s > 0.0 && c_s < 0.5))
        throw ModelError("stubborn fraction must lie in (0, 1/2)");
    const int n_s = static_cast<int>(std::llround(c_s * n));
    const int n_r = n - n_s;
    if (psi < 0.0) {
        const double ln = std::log(static_cast<double>(n));
        psi = ln * ln / static_cast<double>(n);
    }
    if (psi > 1.0) psi = 1.0;
    RgsModel model;
    model.n_r = n_r;
    model.n_s = n_s;
    model.psi_r = build_er_psi(n_r, psi);
    model.psi_s = Eigen::MatrixXd::Constant(n_r, n_s, psi);
    model.description = "uniform link model, n=" + std::to_string(n);
    model.validate();
    return model;
}

RgsModel five_block_model(int n_r1, int n_s1, double beta1, double beta2, double gamma,
                          bool c21, bool c22) {
    if (!(beta1 > 0.0 && beta2 > 0.0 && gamma > 0.0))
        throw ModelError("block-model exponents must be positive");
    const int n = 3 * n_r1 + 2 * n_s1;
    const double ln = std::log(static_cast<double>(n));
    const double p1 = std::pow(ln, beta1) / n;
    const double p2 = std::pow(ln, beta2) / n;
    const double p3 = std::pow(ln, gamma) / n;
    if (p1 > 1.0 || p2 > 1.0 || p3 > 1.0)
        throw ModelError("block link probabilities exceed 1; lower the exponents");

    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(5, 5);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            pi(a, b) = (a == b) ? p1 : p2;
    pi(0, 3) = pi(3, 0) = p3;
    pi(1, 3) = pi(3, 1) = c21 ? p3 : 0.0;
    pi(1, 4) = pi(4, 1) = c22 ? p3 : 0.0;
    pi(2, 4) = pi(4, 2) = p3;

    RgsModel model = build_sbm_model({n_r1, n_r1, n_r1, n_s1, n_s1}, pi,
                                     {false, false, false, true, true});
    model.description = "five-block model, n=" + std::to_string(n);
    return model;
}

std::vector<int> five_block_labels(int n_r1, int n_s1) {
    return sbm_community_labels({n_r1, n_r1, n_r1, n_s1, n_s1},
                                {false, false, false, true, true});
}

Eigen::VectorXd draw_uniform_vector(int n, double lo, double hi, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.next_uniform(lo, hi);
    return v;
}

Eigen::VectorXd draw_block_stubborn_opinions(int n_s1, std::uint64_t seed) {
    Eigen::VectorXd z(2 * n_s1);
    z.head(n_s1) = draw_uniform_vector(n_s1, 0.9, 1.0, derive_seed(seed, 1));
    z.tail(n_s1) = draw_uniform_vector(n_s1, 0.0, 0.1, derive_seed(seed, 2));
    return z;
}

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
    ExperimentConfig cfg;
    if (doc.contains("experiment")) cfg.experiment = doc.at("experiment").get<std::string>();
    if (doc.contains("seeds")) {
        const auto& s = doc.at("seeds");
        if (s.contains("base")) cfg.base_seed = s.at("base").get<std::uint64_t>();
        if (s.contains("trials")) cfg.trials = s.at("trials").get<int>();
    }
    if (doc.contains("parameters")) cfg.parameters = doc.at("parameters");
    if (doc.contains("model")) cfg.model_spec = doc.at("model");
    if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
    if (doc.contains("threads")) cfg.threads = doc.at("threads").get<int>();
    if (cfg.trials < 1)
        throw ModelError("trial count must be >= 1");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ModelError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ModelError(std::string("config file is not valid JSON: ") + e.what());
    }
    return from_json(doc);
}

json ExperimentConfig::manifest_fields() const {
    // Execution details (threads, output_dir) are excluded: result bytes are a
    // pure function of these fields.
    json m;
    m["experiment"] = experiment;
    m["version"] = kVersion;
    m["base_seed"] = base_seed;
    m["trials"] = trials;
    m["parameters"] = parameters;
    m["model"] = model_spec.is_null() ? json() : model_spec;
    return m;
}

void ExperimentResult::write(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / "manifest.json");
        out << manifest.dump(2) << "\n";
    }
    {
        std::ofstream out(fs::path(dir) / "summary.json");
        out << summary.dump(2) << "\n";
    }
    for (const auto& [name, csv] : tables) {
        std::ofstream out(fs::path(dir) / (name + ".csv"));
        out << "# manifest-hash=" << manifest_hash << "\n" << csv;
    }
}

namespace {

ExperimentResult make_result(const ExperimentConfig& cfg, std::vector<std::uint64_t> seeds) {
    ExperimentResult res;
    res.manifest = cfg.manifest_fields();
    res.manifest["trial_seeds"] = seeds;
    res.manifest_hash = fnv1a_hex(res.manifest.dump());
    return res;
}

RgsModel resolve_model(const ExperimentConfig& cfg) {
    const json& spec = cfg.model_spec;
    if (spec.is_null()) {
        const int n = param_or_int(cfg.parameters, "n", 1000);
        const double c_s = param_or(cfg.parameters, "c_s", 0.1);
        return uniform_link_model(n, c_s, param_or(cfg.parameters, "psi", -1.0));
    }
    if (spec.is_string())
        return load_model(spec.get<std::string>());
    if (spec.contains("file"))
        return load_model(spec.at("file").get<std::string>());
    if (spec.contains("uniform")) {
        const auto& u = spec.at("uniform");
        return uniform_link_model(u.at("n").get<int>(), param_or(u, "c_s", 0.1),
                                  param_or(u, "psi", -1.0));
    }
    if (spec.contains("five_block")) {
        const auto& f = spec.at("five_block");
        return five_block_model(param_or_int(f, "n_r1", 600), param_or_int(f, "n_s1", 100),
                                param_or(f, "beta1", 2.0), param_or(f, "beta2", 1.1),
                                param_or(f, "gamma", 3.5), param_or_bool(f, "c21", false),
                                param_or_bool(f, "c22", false));
    }
    return parse_model_json(spec.dump());
}

} // namespace

ExperimentResult run_scaling(const ExperimentConfig& cfg) {
    std::vector<int> n_grid = cfg.parameters.contains("n_grid")
                                  ? cfg.parameters.at("n_grid").get<std::vector<int>>()
                                  : std::vector<int>{100, 316, 1000, 3162};
    if (param_or_bool(cfg.parameters, "include_n_10000", false))
        n_grid.push_back(10000);
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw ModelError("n grid must be strictly increasing");
    const double c_s = param_or(cfg.parameters, "c_s", 0.1);

    std::vector<std::uint64_t> seeds;
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni)
        for (int k = 0; k < cfg.trials; ++k)
            seeds.push_back(trial_seed(cfg.base_seed, static_cast<int>(ni), k));
    ExperimentResult res = make_result(cfg, seeds);

    std::ostringstream table;
    table << "n,trial,seed,attempts,alpha_g,alpha_star,lambda1_mstar,eps_star,"
             "eps_x_case1,eta_x_case1,gate_case1,eps_x_case2,eta_x_case2,gate_case2\n";

    std::vector<double> eps_star_first, eps_star_mean;
    bool dominance_gated_ok = true;
    bool any_gate = false;
    bool all_vacuous = true;

    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        const int n = n_grid[ni];
        const RgsModel model = uniform_link_model(n, c_s, param_or(cfg.parameters, "psi", -1.0));
        const ExpectedGraph star = expected_graph(model);
        const SystemMatrices sys_star = assemble_system(star);
        const DegreeSummary ds = degree_summary(model);
        const double lambda1 = lambda_min_sym(sys_star.m_bar);
        const GatedBound bx1 = bound_x_case1(ds, n);
        const GatedBound bx2 = bound_x_case2(ds, lambda1, n);
        any_gate = any_gate || bx1.gate_ok || bx2.gate_ok;
        all_vacuous = all_vacuous && bx1.vacuous() && bx2.vacuous();

        double mean = 0.0;
        for (int k = 0; k < cfg.trials; ++k) {
            const std::uint64_t ts = trial_seed(cfg.base_seed, static_cast<int>(ni), k);
            int attempts = 0;
            const SampledGraph g = sample_solvable(model, graph_seed(ts), 3, attempts);
            const SystemMatrices sys_g = assemble_system(g);
            const double eps_star = empirical_deviation(sys_g, sys_star);
            mean += eps_star;
            if (k == 0) eps_star_first.push_back(eps_star);
            if (bx1.gate_ok && eps_star > bx1.eps) dominance_gated_ok = false;
            table << n << "," << k << "," << ts << "," << attempts << ","
                  << fmt(static_cast<double>(g.edge_count())) << "," << fmt(star.alpha_star)
                  << "," << fmt(lambda1) << "," << fmt(eps_star) << "," << fmt(bx1.eps) << ","
                  << fmt(bx1.eta) << "," << (bx1.gate_ok ? 1 : 0) << "," << fmt(bx2.eps) << ","
                  << fmt(bx2.eta) << "," << (bx2.gate_ok ? 1 : 0) << "\n";
        }
        eps_star_mean.push_back(mean / cfg.trials);
    }

    std::vector<double> loglog;
    for (int n : n_grid) loglog.push_back(std::log(std::log(static_cast<double>(n))));
    std::vector<double> log_first, log_mean;
    for (double e : eps_star_first) log_first.push_back(std::log(e));
    for (double e : eps_star_mean) log_mean.push_back(std::log(e));

    bool decreasing = true;
    for (std::size_t i = 1; i < eps_star_first.size(); ++i)
        decreasing = decreasing && eps_star_first[i] < eps_star_first[i - 1];

    res.tables.emplace_back("scaling", table.str());
    res.summary["n_grid"] = n_grid;
    res.summary["eps_star_first"] = eps_star_first;
    res.summary["eps_star_mean"] = eps_star_mean;
    res.summary["slope_first"] = n_grid.size() > 1 ? slope_of(loglog, log_first) : 0.0;
    res.summary["slope_mean"] = n_grid.size() > 1 ? slope_of(loglog, log_mean) : 0.0;
    res.summary["strictly_decreasing_first"] = decreasing;
    res.summary["dominance_gated_ok"] = dominance_gated_ok;
    res.summary["any_gate"] = any_gate;
    res.summary["all_vacuous"] = all_vacuous;
    return res;
}

ExperimentResult run_sbm_profile(const ExperimentConfig& cfg) {
    const double gamma = param_or(cfg.parameters, "gamma", 3.5);
    const bool c21 = param_or_bool(cfg.parameters, "c21", false);
    const bool c22 = param_or_bool(cfg.parameters, "c22", false);
    const int n_r1 = param_or_int(cfg.parameters, "n_r1", 600);
    const int n_s1 = param_or_int(cfg.parameters, "n_s1", 100);
    const double beta1 = param_or(cfg.parameters, "beta1", 2.0);
    const double beta2 = param_or(cfg.parameters, "beta2", 1.1);
    const double c_m = param_or(cfg.parameters, "c_M", 0.5);
    const double threshold = param_or(cfg.parameters, "threshold", 10.0);
    const std::vector<double> eps_grid =
        cfg.parameters.contains("eps_grid")
            ? cfg.parameters.at("eps_grid").get<std::vector<double>>()
            : std::vector<double>{0.01, 0.02, 0.05, 0.1, 0.2};

    const RgsModel model = five_block_model(n_r1, n_s1, beta1, beta2, gamma, c21, c22);
    const std::vector<int> labels = five_block_labels(n_r1, n_s1);
    const ExpectedGraph star = expected_graph(model);
    const SystemMatrices sys_star = assemble_system(star);
    const DegreeSummary ds = degree_summary(model);
    const double lambda1 = lambda_min_sym(sys_star.m_bar);
    const double lambda2 = lambda2_laplacian(sys_star.l_bar);

    std::optional<BlockSpectra> block;
    if (ds.delta_rs_min == 0.0 && ds.n_r1 > 0 && ds.n_r2 > 0) {
        std::vector<int> pos, zero;
        for (int i = 0; i < model.n_r; ++i)
            (model.psi_s.row(i).sum() > 0.0 ? pos : zero).push_back(i);
        Eigen::MatrixXd c22m(zero.size(), zero.size());
        Eigen::MatrixXd m21(zero.size(), pos.size());
        for (std::size_t a = 0; a < zero.size(); ++a) {
            for (std::size_t b = 0; b < zero.size(); ++b)
                c22m(a, b) = sys_star.m_bar(zero[a], zero[b]);
            for (std::size_t b = 0; b < pos.size(); ++b)
                m21(a, b) = sys_star.m_bar(zero[a], pos[b]);
        }
        block = BlockSpectra{lambda_min_sym(c22m), spectral_norm(m21)};
    }
    ProfileVerdict verdict = regime_diagnostics(ds, lambda1, lambda2, c_m, threshold, block);

    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < cfg.trials; ++k) seeds.push_back(trial_seed(cfg.base_seed, 0, k));
    ExperimentResult res = make_result(cfg, seeds);

    const Factored star_fact(sys_star.m_bar);

    struct TrialOut {
        std::string opinions, communities, violations;
        json stats;
    };
    std::vector<TrialOut> outs(cfg.trials);

    parallel_trials(cfg.trials, cfg.threads, [&](int k) {
        const std::uint64_t ts = seeds[k];
        const Eigen::VectorXd z = draw_block_stubborn_opinions(n_s1, stubborn_seed(ts));
        int attempts = 0;
        const SampledGraph g = sample_solvable(model, graph_seed(ts), 3, attempts);
        const SystemMatrices sys_g = assemble_system(g);
        const Eigen::VectorXd x_g = solve_system(sys_g, sys_g.u_bar * z);
        const Eigen::VectorXd x_star = star_fact.solve(sys_star.u_bar * z);

        Eigen::VectorXd limit;
        if (ds.delta_rs_min > 0.0)
            limit = large_influence_limit(model.psi_s, z);
        else
            limit = block_limit(sys_star, z);
        const double z_norm = z.norm();
        const double gamma_n = consensus_value(model.psi_s, z, lambda1, model.n_r);
        const double res_limit = (x_star - limit).norm() / z_norm;
        const double res_gamma =
            (x_star - gamma_n * Eigen::VectorXd::Ones(model.n_r)).norm() / z_norm;

        TrialOut& out = outs[k];
        std::ostringstream op;
        op.precision(17);
        for (int i = 0; i < model.n_r; ++i)
            op << k << "," << (i + 1) << "," << labels[i] << "," << fmt(x_g[i]) << ","
               << fmt(x_star[i]) << "," << fmt(limit[i]) << "\n";
        out.opinions = op.str();

        std::ostringstream cm;
        json stats;
        stats["trial"] = k;
        stats["attempts"] = attempts;
        for (int c = 0; c < 3; ++c) {
            const CommunityStats sg = community_stats(x_g, labels, c);
            const CommunityStats ss = community_stats(x_star, labels, c);
            cm << k << "," << c << "," << fmt(sg.mean) << "," << fmt(sg.spread) << ","
               << fmt(ss.mean) << "," << fmt(ss.spread) << "\n";
            stats["mean_xg"].push_back(sg.mean);
            stats["spread_xg"].push_back(sg.spread);
            stats["mean_xstar"].push_back(ss.mean);
            stats["spread_xstar"].push_back(ss.spread);
        }
        stats["mean_z_s1"] = z.head(n_s1).mean();
        stats["mean_z_s2"] = z.tail(n_s1).mean();
        stats["total_spread_xg"] = x_g.maxCoeff() - x_g.minCoeff();
        stats["gamma_n"] = gamma_n;
        stats["residual_limit"] = res_limit;
        stats["residual_gamma"] = res_gamma;
        out.stats = std::move(stats);

        std::ostringstream vi;
        for (double eps : eps_grid) {
            const ViolationSet v = entrywise_violation_set(x_g, x_star, eps);
            vi << k << "," << fmt(eps) << "," << fmt(v.within_fraction) << "\n";
        }
        out.violations = vi.str();
        out.communities = cm.str();
    });

    std::string opinions = "trial,agent_id,community,x_g,x_star,limit\n";
    std::string communities = "trial,community,mean_xg,spread_xg,mean_xstar,spread_xstar\n";
    std::string violations = "trial,eps,within_fraction\n";
    json trial_stats = json::array();
    for (const auto& out : outs) {
        opinions += out.opinions;
        communities += out.communities;
        violations += out.violations;
        trial_stats.push_back(out.stats);
    }
    res.tables.emplace_back("opinions", opinions);
    res.tables.emplace_back("communities", communities);
    res.tables.emplace_back("violations", violations);

    // verdict record with the trial-averaged consensus value and residual
    double gamma_n_mean = 0.0, residual_mean = 0.0;
    for (const auto& t : trial_stats) {
        gamma_n_mean += t.at("gamma_n").get<double>();
        residual_mean += t.at("residual_limit").get<double>();
    }
    verdict.gamma_n = gamma_n_mean / cfg.trials;
    verdict.residual = residual_mean / cfg.trials;

    res.summary["gamma"] = gamma;
    res.summary["c21"] = c21;
    res.summary["c22"] = c22;
    res.summary["n"] = model.n();
    res.summary["lambda1_mstar"] = lambda1;
    res.summary["lambda2_lstar"] = lambda2;
    res.summary["regime"] = regime_name(verdict.regime);
    res.summary["ratios"] = verdict.ratios;
    res.summary["verdict"] = json::parse(verdict.to_json("opinions.csv"));
    res.summary["trial_stats"] = trial_stats;
    return res;
}

ExperimentResult run_time_average(const ExperimentConfig& cfg) {
    const double gamma = param_or(cfg.parameters, "gamma", 2.0);
    const bool c21 = param_or_bool(cfg.parameters, "c21", false);
    const bool c22 = param_or_bool(cfg.parameters, "c22", false);
    const int n_r1 = param_or_int(cfg.parameters, "n_r1", 600);
    const int n_s1 = param_or_int(cfg.parameters, "n_s1", 100);
    const double beta1 = param_or(cfg.parameters, "beta1", 2.0);
    const double beta2 = param_or(cfg.parameters, "beta2", 1.1);
    const std::int64_t t_max = static_cast<std::int64_t>(param_or(cfg.parameters, "t_max", 5e4));
    const double eps_s = param_or(cfg.parameters, "eps_S", 0.05);
    const int hist_bins = param_or_int(cfg.parameters, "hist_bins", 40);
    std::vector<std::int64_t> checkpoints =
        cfg.parameters.contains("checkpoints")
            ? cfg.parameters.at("checkpoints").get<std::vector<std::int64_t>>()
            : std::vector<std::int64_t>{100, 1000, 10000, 50000};
    checkpoints.erase(std::remove_if(checkpoints.begin(), checkpoints.end(),
                                     [&](std::int64_t c) { return c < 1 || c > t_max; }),
                      checkpoints.end());
    std::sort(checkpoints.begin(), checkpoints.end());
    if (checkpoints.empty() || checkpoints.back() != t_max) checkpoints.push_back(t_max);

    const RgsModel model = five_block_model(n_r1, n_s1, beta1, beta2, gamma, c21, c22);
    const std::vector<int> labels = five_block_labels(n_r1, n_s1);
    const ExpectedGraph star = expected_graph(model);
    const SystemMatrices sys_star = assemble_system(star);
    const DegreeSummary ds = degree_summary(model);
    const double lambda1 = lambda_min_sym(sys_star.m_bar);
    const Factored star_fact(sys_star.m_bar);
    const double sqrt_nr = std::sqrt(static_cast<double>(model.n_r));

    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < cfg.trials; ++k) seeds.push_back(trial_seed(cfg.base_seed, 0, k));
    ExperimentResult res = make_result(cfg, seeds);

    struct TrialOut {
        std::string checkpoints, s_values, histogram;
        json stats;
    };
    std::vector<TrialOut> outs(cfg.trials);

    parallel_trials(cfg.trials, cfg.threads, [&](int k) {
        const std::uint64_t ts = seeds[k];
        const Eigen::VectorXd z = draw_block_stubborn_opinions(n_s1, stubborn_seed(ts));
        const Eigen::VectorXd x0 = draw_uniform_vector(model.n_r, 0.0, 1.0, opinion_seed(ts));
        int attempts = 0;
        const SampledGraph g = sample_solvable(model, graph_seed(ts), 3, attempts);
        const SystemMatrices sys_g = assemble_system(g);
        const Eigen::VectorXd x_g = solve_system(sys_g, sys_g.u_bar * z);
        const Eigen::VectorXd x_star = star_fact.solve(sys_star.u_bar * z);
        const InteractionTable table = make_interaction_table(g);

        GossipTrajectory traj = init_trajectory(x0, z, derive_seed(ts, 0x74726AULL));
        TrialOut& out = outs[k];
        std::ostringstream cp;
        for (std::int64_t c : checkpoints) {
            run(traj, table, c - traj.t);
            const Eigen::VectorXd s = time_average(traj);
            cp << k << "," << c << "," << fmt((s - x_g).norm()) << ","
               << fmt((s - x_star).norm()) << "," << fmt((s - x_g).norm() / sqrt_nr) << ","
               << fmt((s - x_star).norm() / sqrt_nr) << "\n";
        }
        out.checkpoints = cp.str();

        const Eigen::VectorXd s_final = time_average(traj);
        std::ostringstream sv;
        for (int i = 0; i < model.n_r; ++i)
            sv << k << "," << (i + 1) << "," << labels[i] << "," << fmt(s_final[i]) << ","
               << fmt(x_g[i]) << "," << fmt(x_star[i]) << "\n";
        out.s_values = sv.str();

        std::vector<int> counts(hist_bins, 0);
        for (int i = 0; i < model.n_r; ++i) {
            int b = static_cast<int>(std::floor(s_final[i] * hist_bins));
            b = std::clamp(b, 0, hist_bins - 1);
            counts[b] += 1;
        }
        std::ostringstream hg;
        for (int b = 0; b < hist_bins; ++b)
            hg << k << "," << fmt(static_cast<double>(b) / hist_bins) << ","
               << fmt(static_cast<double>(b + 1) / hist_bins) << "," << counts[b] << "\n";
        out.histogram = hg.str();

        json stats;
        stats["trial"] = k;
        stats["attempts"] = attempts;
        stats["dev_xg"] = (s_final - x_g).norm();
        stats["dev_xstar"] = (s_final - x_star).norm();
        stats["rms_xg"] = (s_final - x_g).norm() / sqrt_nr;
        stats["rms_xstar"] = (s_final - x_star).norm() / sqrt_nr;
        stats["c_x"] = traj.c_x;
        stats["z_norm"] = z.norm();
        out.stats = std::move(stats);
    });

    std::string cp_table = "trial,t,dev_xg,dev_xstar,rms_xg,rms_xstar\n";
    std::string sv_table = "trial,agent_id,community,s_value,x_g,x_star\n";
    std::string hg_table = "trial,bin_lo,bin_hi,count\n";
    json trial_stats = json::array();
    double worst_rms = 0.0;
    double max_c_x = 0.0, max_z_norm = 0.0;
    for (const auto& out : outs) {
        cp_table += out.checkpoints;
        sv_table += out.s_values;
        hg_table += out.histogram;
        trial_stats.push_back(out.stats);
        worst_rms = std::max(worst_rms, out.stats.at("rms_xg").get<double>());
        max_c_x = std::max(max_c_x, out.stats.at("c_x").get<double>());
        max_z_norm = std::max(max_z_norm, out.stats.at("z_norm").get<double>());
    }
    res.tables.emplace_back("checkpoints", cp_table);
    res.tables.emplace_back("s_values", sv_table);
    res.tables.emplace_back("histogram", hg_table);

    // Concentration radius for the worst-case inputs over the trial set; each
    // case may be out of domain at this size, which the summary records.
    json bound_info = json::array();
    double best_total_eta = std::numeric_limits<double>::infinity();
    double best_radius = std::numeric_limits<double>::quiet_NaN();
    for (BoundCase which : {BoundCase::stubborn_min_degree, BoundCase::spectral}) {
        json entry;
        entry["case"] = which == BoundCase::stubborn_min_degree ? 1 : 2;
        try {
            const TimeAverageBound b =
                bound_time_average(ds, star.alpha_star, max_c_x, lambda1, model.n(), eps_s,
                                   max_z_norm, t_max, which);
            entry["applicable"] = true;
            entry["report"] = json::parse(b.to_json());
            if (b.eta_s_t + b.eta_s_n < best_total_eta) {
                best_total_eta = b.eta_s_t + b.eta_s_n;
                best_radius = b.total_radius;
            }
        } catch (const DomainError& e) {
            entry["applicable"] = false;
            entry["reason"] = e.what();
        }
        bound_info.push_back(entry);
    }
    int radius_failures = 0;
    if (std::isfinite(best_total_eta) && best_total_eta < 1.0) {
        for (const auto& out : outs)
            if (out.stats.at("dev_xstar").get<double>() > best_radius) ++radius_failures;
    }

    res.summary["gamma"] = gamma;
    res.summary["t_max"] = t_max;
    res.summary["eps_S"] = eps_s;
    res.summary["trial_stats"] = trial_stats;
    res.summary["worst_rms_xg"] = worst_rms;
    res.summary["bounds"] = bound_info;
    res.summary["best_total_eta"] =
        std::isfinite(best_total_eta) ? json(best_total_eta) : json();
    res.summary["radius_failure_count"] = radius_failures;
    return res;
}

ExperimentResult run_mc_concentration(const ExperimentConfig& cfg) {
    const RgsModel model = resolve_model(cfg);
    const BoundCase which = param_or_int(cfg.parameters, "case", 1) == 2
                                ? BoundCase::spectral
                                : BoundCase::stubborn_min_degree;
    const Eigen::VectorXd z =
        draw_uniform_vector(model.n_s, param_or(cfg.parameters, "z_lo", 0.0),
                            param_or(cfg.parameters, "z_hi", 1.0), stubborn_seed(cfg.base_seed));

    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < cfg.trials; ++k)
        seeds.push_back(derive_seed(cfg.base_seed, 0x6D63ULL, static_cast<std::uint64_t>(k)));
    ExperimentResult res = make_result(cfg, seeds);

    const McReport rep =
        mc_validate_concentration(model, z, cfg.trials, cfg.base_seed, which, cfg.threads);
    res.tables.emplace_back("mc", rep.csv());
    res.summary["eps_x"] = rep.eps_x;
    res.summary["eta_x"] = rep.eta_x;
    res.summary["gate_ok"] = rep.gate_ok;
    res.summary["vacuous"] = rep.vacuous;
    res.summary["singular_count"] = rep.singular_count;
    res.summary["exceed_frequency"] = rep.exceed_frequency;
    res.summary["covered"] = rep.covered;
    res.summary["n"] = model.n();
    res.exit_code = rep.vacuous ? 2 : 0;
    return res;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "scaling") return run_scaling(cfg);
    if (cfg.experiment == "sbm_profile") return run_sbm_profile(cfg);
    if (cfg.experiment == "time_average") return run_time_average(cfg);
    if (cfg.experiment == "mc_concentration") return run_mc_concentration(cfg);
    throw ModelError("unknown experiment: " + cfg.experiment);
}

} // namespace gossip
