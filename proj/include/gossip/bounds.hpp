#pragma once

#include "gossip/model.hpp"
#include "gossip/system.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gossip {

/// One closed-form high-probability bound: deviation radius eps holding with
/// probability at least 1 - eta, valid under a hypothesis recorded in
/// gate_ok. Values are always computed; the gate never blocks evaluation.
struct GatedBound {
    double eps = 0.0;
    double eta = 0.0;
    bool gate_ok = false;

    /// eta >= 1 carries no information.
    bool vacuous() const { return !(eta < 1.0); }
};

/// Which hypothesis family a report was evaluated under:
/// case 1 gates on the minimum expected stubborn degree, case 2 on the
/// smallest eigenvalue of the expected system matrix.
enum class BoundCase { stubborn_min_degree = 1, spectral = 2 };

/// Every closed-form deviation bound for one model, gate flags included.
struct BoundReport {
    BoundCase bound_case = BoundCase::stubborn_min_degree;
    int n = 0;
    double lambda1_mstar = 0.0;
    double alpha_star = 0.0;
    GatedBound x;       // expected final opinions
    GatedBound m;       // system matrix
    GatedBound u;       // stubborn block
    GatedBound m_inv;   // inverse system matrix
    GatedBound q;       // spectral radius of the expected update
    // individual hypothesis flags
    bool gate_min_degree = false;   // delta_rs_min > 8 log n
    bool gate_lambda1 = false;      // lambda1 > 4 sqrt(delta_r_max log n)
    bool gate_delta_r = false;      // delta_r_max >= log n
    bool gate_delta_rs_sr = false;  // delta_rs_max v delta_sr_max >= log n

    /// True when every eta in the report is >= 1.
    bool vacuous = false;

    std::string to_json() const;
};

// Closed forms, evaluated from a degree summary. `n` is the network size.
GatedBound bound_M(const DegreeSummary& ds, int n);
GatedBound bound_U(const DegreeSummary& ds, int n);
GatedBound bound_Minv_case1(const DegreeSummary& ds, int n);
GatedBound bound_Minv_case2(const DegreeSummary& ds, double lambda1_mstar, int n);
GatedBound bound_alpha_rho_case1(const DegreeSummary& ds, double alpha_star, int n);
GatedBound bound_alpha_rho_case2(const DegreeSummary& ds, double lambda1_mstar,
                                 double alpha_star, int n);
GatedBound bound_x_case1(const DegreeSummary& ds, int n);
GatedBound bound_x_case2(const DegreeSummary& ds, double lambda1_mstar, int n);

/// Assembles the full report for one case.
BoundReport bound_report(const DegreeSummary& ds, double lambda1_mstar, double alpha_star,
                         int n, BoundCase which);

/// Uniform-model reduction of the case-1 opinion bound:
/// 4 [c_s sqrt(1-c_s) + 2 (1-c_s)] / c_s^2 * sqrt(log n / (n psi)).
/// Uses the row/column-sum relaxation of ||psi_s||; documented estimate, not
/// the exact-norm bound.
double uniform_model_eps_x(int n, double c_s, double psi);

/// Concentration of the time average around the expected-graph opinions.
struct TimeAverageBound {
    BoundCase bound_case = BoundCase::stubborn_min_degree;
    double eps_s = 0.0;         // chosen per-entry accuracy
    double s_bar_star = 0.0;    // worst-case bias scale
    double t_min = 0.0;         // admissible times are t > t_min
    double eta_s_t = 0.0;       // time-dependent failure mass
    double eta_s_n = 0.0;       // size-dependent failure mass
    double eps_x = 0.0;         // opinion-bound radius entering the total
    double total_radius = 0.0;  // sqrt(n_r) eps_s + eps_x ||z||
    bool gate_ok = false;
    bool vacuous() const { return !(eta_s_t + eta_s_n < 1.0); }

    std::string to_json() const;
};

/// Throws DomainError unless t > 2 s_bar_star / eps_s.
TimeAverageBound bound_time_average(const DegreeSummary& ds, double alpha_star, double c_x,
                                    double lambda1_mstar, int n, double eps_s, double z_norm,
                                    std::int64_t t, BoundCase which);

/// Indices where |x_g - x_star| > eps, plus the complementary fraction.
struct ViolationSet {
    std::vector<int> indices;
    double within_fraction = 0.0; // |V_r \ V| / n_r
};

ViolationSet entrywise_violation_set(const Eigen::VectorXd& x_g, const Eigen::VectorXd& x_star,
                                     double eps);

/// Monte-Carlo check of the opinion concentration bound: samples graphs,
/// solves each, and compares the deviation frequency with the computed eta.
struct McTrial {
    int trial = 0;
    std::uint64_t seed = 0;
    double deviation = 0.0; // ||x_g - x_star|| / ||z||
    bool exceeded = false;
    bool singular = false;
};

struct McReport {
    std::vector<McTrial> trials;
    double eps_x = 0.0;
    double eta_x = 0.0;
    bool gate_ok = false;
    bool vacuous = false;
    int singular_count = 0;
    double exceed_frequency = 0.0; // over non-singular trials
    /// vacuous, or exceed_frequency <= eta_x
    bool covered = false;

    std::string csv() const; // trial,seed,deviation,eps_x,exceeded,singular
};

McReport mc_validate_concentration(const RgsModel& model, const Eigen::VectorXd& z_s, int trials,
                                   std::uint64_t seed, BoundCase which = BoundCase::stubborn_min_degree,
                                   int threads = 1);

} // namespace gossip
