#include "gossip/bounds.hpp"
#include "gossip/errors.hpp"
#include "gossip/rng.hpp"
#include "gossip/solver.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace gossip {

namespace {

double log_n(int n) {
    if (n < 2)
        throw DomainError("bounds need a network of at least 2 agents");
    return std::log(static_cast<double>(n));
}

double pow_n(int n, double e) { return std::pow(static_cast<double>(n), e); }

/// r0 * n^(1 - delta_rs / (8 log n)), the min-stubborn-degree failure mass.
double eta_min_degree(const DegreeSummary& ds, int n) {
    return ds.r0 * pow_n(n, 1.0 - ds.delta_rs_min / (8.0 * log_n(n)));
}

double delta_rs_sr(const DegreeSummary& ds) { return std::max(ds.delta_rs_max, ds.delta_sr_max); }

} // namespace

GatedBound bound_M(const DegreeSummary& ds, int n) {
    GatedBound b;
    b.gate_ok = ds.delta_r_max >= log_n(n);
    b.eps = 4.0 * std::sqrt(ds.delta_r_max * log_n(n));
    b.eta = 2.0 * ds.r0 * pow_n(n, -0.2);
    return b;
}

GatedBound bound_U(const DegreeSummary& ds, int n) {
    GatedBound b;
    b.gate_ok = delta_rs_sr(ds) >= log_n(n);
    b.eps = 2.0 * std::sqrt(delta_rs_sr(ds) * log_n(n));
    b.eta = 2.0 * pow_n(n, -0.2);
    return b;
}

GatedBound bound_Minv_case1(const DegreeSummary& ds, int n) {
    GatedBound b;
    const GatedBound m = bound_M(ds, n);
    b.gate_ok = ds.delta_rs_min > 8.0 * log_n(n);
    b.eps = 2.0 * m.eps / (ds.delta_rs_min * ds.delta_rs_min);
    b.eta = eta_min_degree(ds, n) + m.eta;
    return b;
}

GatedBound bound_Minv_case2(const DegreeSummary& ds, double lambda1_mstar, int n) {
    GatedBound b;
    const GatedBound m = bound_M(ds, n);
    b.gate_ok = lambda1_mstar > m.eps && ds.delta_r_max >= log_n(n);
    b.eps = m.eps / (lambda1_mstar * (lambda1_mstar - m.eps));
    b.eta = m.eta;
    return b;
}

GatedBound bound_alpha_rho_case1(const DegreeSummary& ds, double alpha_star, int n) {
    GatedBound b;
    b.gate_ok = ds.delta_rs_min > 8.0 * log_n(n);
    b.eps = 1.0 - ds.delta_rs_min / (6.0 * alpha_star);
    b.eta = eta_min_degree(ds, n) + 2.0 * pow_n(n, -2.0 / 3.0);
    return b;
}

GatedBound bound_alpha_rho_case2(const DegreeSummary& ds, double lambda1_mstar,
                                 double alpha_star, int n) {
    GatedBound b;
    const GatedBound m = bound_M(ds, n);
    b.gate_ok = lambda1_mstar > m.eps && ds.delta_r_max >= log_n(n);
    b.eps = 1.0 - (lambda1_mstar - m.eps) / (3.0 * alpha_star);
    b.eta = m.eta + 2.0 * pow_n(n, -0.125);
    return b;
}

GatedBound bound_x_case1(const DegreeSummary& ds, int n) {
    GatedBound b;
    const double ln = log_n(n);
    b.gate_ok = ds.delta_rs_min > 8.0 * ln;
    b.eps = 4.0 * (std::sqrt(delta_rs_sr(ds) * ln) / ds.delta_rs_min +
                   2.0 * std::sqrt(ds.delta_r_max * ln) * ds.psi_s_norm /
                       (ds.delta_rs_min * ds.delta_rs_min));
    b.eta = eta_min_degree(ds, n) + 2.0 * (1.0 + ds.r0) * pow_n(n, -0.2) +
            2.0 * pow_n(n, -2.0 / 3.0);
    return b;
}

GatedBound bound_x_case2(const DegreeSummary& ds, double lambda1_mstar, int n) {
    GatedBound b;
    const double ln = log_n(n);
    const double eps_m = 4.0 * std::sqrt(ds.delta_r_max * ln);
    b.gate_ok = lambda1_mstar > eps_m && ds.delta_r_max >= ln && delta_rs_sr(ds) >= ln;
    const double gap = lambda1_mstar - eps_m;
    b.eps = 2.0 * (std::sqrt(delta_rs_sr(ds) * ln) / gap +
                   2.0 * std::sqrt(ds.delta_r_max * ln) * ds.psi_s_norm / (lambda1_mstar * gap));
    b.eta = 2.0 * (1.0 + ds.r0) * pow_n(n, -0.2) + 2.0 * pow_n(n, -0.125);
    return b;
}

BoundReport bound_report(const DegreeSummary& ds, double lambda1_mstar, double alpha_star,
                         int n, BoundCase which) {
    BoundReport rep;
    rep.bound_case = which;
    rep.n = n;
    rep.lambda1_mstar = lambda1_mstar;
    rep.alpha_star = alpha_star;
    rep.m = bound_M(ds, n);
    rep.u = bound_U(ds, n);
    if (which == BoundCase::stubborn_min_degree) {
        rep.x = bound_x_case1(ds, n);
        rep.m_inv = bound_Minv_case1(ds, n);
        rep.q = bound_alpha_rho_case1(ds, alpha_star, n);
    } else {
        rep.x = bound_x_case2(ds, lambda1_mstar, n);
        rep.m_inv = bound_Minv_case2(ds, lambda1_mstar, n);
        rep.q = bound_alpha_rho_case2(ds, lambda1_mstar, alpha_star, n);
    }
    rep.gate_min_degree = ds.delta_rs_min > 8.0 * log_n(n);
    rep.gate_lambda1 = lambda1_mstar > 4.0 * std::sqrt(ds.delta_r_max * log_n(n));
    rep.gate_delta_r = ds.delta_r_max >= log_n(n);
    rep.gate_delta_rs_sr = delta_rs_sr(ds) >= log_n(n);
    rep.vacuous = rep.x.vacuous() && rep.m.vacuous() && rep.u.vacuous() &&
                  rep.m_inv.vacuous() && rep.q.vacuous();
    return rep;
}

double uniform_model_eps_x(int n, double c_s, double psi) {
    if (!(c_s > 0.0 && c_s < 0.5))
        throw DomainError("stubborn fraction must lie in (0, 1/2)");
    if (!(psi > 0.0))
        throw DomainError("link probability must be positive");
    const double c = 4.0 * (c_s * std::sqrt(1.0 - c_s) + 2.0 * (1.0 - c_s)) / (c_s * c_s);
    return c * std::sqrt(log_n(n) / (n * psi));
}

namespace {

nlohmann::json gated_json(const GatedBound& b) {
    return {{"eps", b.eps}, {"eta", b.eta}, {"gate_ok", b.gate_ok}, {"vacuous", b.vacuous()}};
}

} // namespace

std::string BoundReport::to_json() const {
    nlohmann::json doc;
    doc["case"] = bound_case == BoundCase::stubborn_min_degree ? "stubborn_min_degree" : "spectral";
    doc["n"] = n;
    doc["lambda1_mstar"] = lambda1_mstar;
    doc["alpha_star"] = alpha_star;
    doc["eps_x"] = x.eps;
    doc["eta_x"] = x.eta;
    doc["eps_M"] = m.eps;
    doc["eta_M"] = m.eta;
    doc["eps_U"] = u.eps;
    doc["eta_U"] = u.eta;
    doc["eps_Minv"] = m_inv.eps;
    doc["eta_Minv"] = m_inv.eta;
    doc["eps_Q"] = q.eps;
    doc["eta_Q"] = q.eta;
    doc["bounds"] = {{"x", gated_json(x)},
                     {"M", gated_json(m)},
                     {"U", gated_json(u)},
                     {"Minv", gated_json(m_inv)},
                     {"Q", gated_json(q)}};
    doc["assumption_flags"] = {{"min_degree", gate_min_degree},
                               {"lambda1", gate_lambda1},
                               {"delta_r", gate_delta_r},
                               {"delta_rs_sr", gate_delta_rs_sr}};
    doc["vacuous"] = vacuous;
    return doc.dump(2);
}

TimeAverageBound bound_time_average(const DegreeSummary& ds, double alpha_star, double c_x,
                                    double lambda1_mstar, int n, double eps_s, double z_norm,
                                    std::int64_t t, BoundCase which) {
    if (!(eps_s > 0.0))
        throw DomainError("eps_s must be positive");
    TimeAverageBound b;
    b.bound_case = which;
    b.eps_s = eps_s;
    const double sqrt_nr = std::sqrt(static_cast<double>(ds.n_r));
    if (which == BoundCase::stubborn_min_degree) {
        if (!(ds.delta_rs_min > 0.0))
            throw DomainError("case-1 time-average bound needs positive minimum stubborn degree");
        b.s_bar_star = 12.0 * sqrt_nr * c_x * alpha_star / ds.delta_rs_min;
        const GatedBound x = bound_x_case1(ds, n);
        b.eps_x = x.eps;
        b.eta_s_n = x.eta;
        b.gate_ok = x.gate_ok;
    } else {
        const double eps_m = 4.0 * std::sqrt(ds.delta_r_max * log_n(n));
        if (!(lambda1_mstar > eps_m))
            throw DomainError("case-2 time-average bound needs lambda1 above the matrix radius");
        b.s_bar_star = 6.0 * sqrt_nr * c_x * alpha_star / (lambda1_mstar - eps_m);
        const GatedBound x = bound_x_case2(ds, lambda1_mstar, n);
        b.eps_x = x.eps;
        b.eta_s_n = x.eta;
        b.gate_ok = x.gate_ok;
    }
    b.t_min = 2.0 * b.s_bar_star / eps_s;
    const double td = static_cast<double>(t);
    if (!(td > b.t_min))
        throw DomainError("time-average bound undefined: t must exceed 2 s_bar_star / eps_s = " +
                          std::to_string(b.t_min));
    const double num = td * eps_s - 2.0 * b.s_bar_star;
    b.eta_s_t = 2.0 * ds.n_r * std::exp(-(num * num) / (2.0 * td * b.s_bar_star * b.s_bar_star));
    b.total_radius = sqrt_nr * eps_s + b.eps_x * z_norm;
    return b;
}

std::string TimeAverageBound::to_json() const {
    nlohmann::json doc;
    doc["case"] = bound_case == BoundCase::stubborn_min_degree ? "stubborn_min_degree" : "spectral";
    doc["eps_s"] = eps_s;
    doc["s_bar_star"] = s_bar_star;
    doc["t_min"] = t_min;
    doc["eta_s_t"] = eta_s_t;
    doc["eta_s_n"] = eta_s_n;
    doc["eps_x"] = eps_x;
    doc["total_radius"] = total_radius;
    doc["gate_ok"] = gate_ok;
    doc["vacuous"] = vacuous();
    return doc.dump(2);
}

ViolationSet entrywise_violation_set(const Eigen::VectorXd& x_g, const Eigen::VectorXd& x_star,
                                     double eps) {
    if (x_g.size() != x_star.size())
        throw DomainError("violation set: vectors must have equal length");
    if (!(eps > 0.0))
        throw DomainError("violation set: eps must be positive");
    ViolationSet v;
    for (int i = 0; i < x_g.size(); ++i)
        if (std::abs(x_g[i] - x_star[i]) > eps)
            v.indices.push_back(i);
    v.within_fraction =
        1.0 - static_cast<double>(v.indices.size()) / static_cast<double>(x_g.size());
    return v;
}

McReport mc_validate_concentration(const RgsModel& model, const Eigen::VectorXd& z_s, int trials,
                                   std::uint64_t seed, BoundCase which, int threads) {
    if (trials < 1)
        throw DomainError("at least one trial required");
    model.validate();
    if (z_s.size() != model.n_s)
        throw DomainError("stubborn opinion vector has wrong length");

    const ExpectedGraph star = expected_graph(model);
    const SystemMatrices sys_star = assemble_system(star);
    const OpinionSolution sol_star = expected_final_opinions(sys_star, z_s);
    const DegreeSummary ds = degree_summary(model);

    McReport rep;
    const GatedBound x = which == BoundCase::stubborn_min_degree
                             ? bound_x_case1(ds, model.n())
                             : bound_x_case2(ds, sol_star.lambda_min_m, model.n());
    rep.eps_x = x.eps;
    rep.eta_x = x.eta;
    rep.gate_ok = x.gate_ok;
    rep.vacuous = x.vacuous();

    const double z_norm = z_s.norm();
    rep.trials.resize(trials);
    const int workers = std::max(1, threads);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= trials) return;
            McTrial trial;
            trial.trial = k;
            trial.seed = derive_seed(seed, 0x6D63ULL, static_cast<std::uint64_t>(k));
            try {
                const SampledGraph g = sample_graph(model, trial.seed);
                const SystemMatrices sys_g = assemble_system(g);
                const Eigen::VectorXd x_g = solve_system(
                    sys_g, sys_g.u_bar * z_s);
                trial.deviation =
                    z_norm > 0.0 ? (x_g - sol_star.x).norm() / z_norm : (x_g - sol_star.x).norm();
                trial.exceeded = trial.deviation > rep.eps_x;
            } catch (const SingularError&) {
                trial.singular = true;
            }
            rep.trials[k] = trial;
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    int exceeded = 0;
    for (const auto& trial : rep.trials) {
        if (trial.singular)
            ++rep.singular_count;
        else if (trial.exceeded)
            ++exceeded;
    }
    const int valid = trials - rep.singular_count;
    if (valid == 0)
        throw DomainError("every trial produced a singular system; model is degenerate");
    rep.exceed_frequency = static_cast<double>(exceeded) / static_cast<double>(valid);
    rep.covered = rep.vacuous || rep.exceed_frequency <= rep.eta_x;
    return rep;
}

std::string McReport::csv() const {
    std::ostringstream out;
    out.precision(17);
    out << "trial,seed,deviation,eps_x,exceeded,singular\n";
    for (const auto& t : trials)
        out << t.trial << "," << t.seed << "," << t.deviation << "," << eps_x << ","
            << (t.exceeded ? 1 : 0) << "," << (t.singular ? 1 : 0) << "\n";
    return out.str();
}

} // namespace gossip
