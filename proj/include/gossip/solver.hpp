#pragma once

#include "gossip/spectral.hpp"
#include "gossip/system.hpp"

#include <string>

namespace gossip {

/// Expected one-step update matrices: q_bar = I - m_bar/(2 alpha),
/// r_bar = u_bar/(2 alpha). Rows of [q_bar r_bar] sum to one.
struct ExpectedUpdate {
    Eigen::MatrixXd q_bar;
    Eigen::MatrixXd r_bar;
    double alpha = 0.0;
};

ExpectedUpdate build_expected_update(const SystemMatrices& sys);

/// Expected final opinions x solving m_bar x = u_bar z, with diagnostics.
struct OpinionSolution {
    Eigen::VectorXd x;
    double lambda_min_m = 0.0;
    double solver_residual = 0.0;
    SystemKind kind = SystemKind::sampled;
};

/// Solves m_bar x = u_bar z by symmetric factorization (conjugate gradient
/// above 10^4 regular agents). Throws SingularError when m_bar is singular or
/// indefinite, naming a component without stubborn attachment when one exists.
OpinionSolution expected_final_opinions(const SystemMatrices& sys, const Eigen::VectorXd& z_s);

/// Multi-column solve m_bar X = B under the same contract.
Eigen::MatrixXd solve_system(const SystemMatrices& sys, const Eigen::MatrixXd& rhs);

/// Spectral norm of m_bar_g^{-1} u_bar_g - m_bar_star^{-1} u_bar_star,
/// the observable counterpart of the opinion concentration bound.
double empirical_deviation(const SystemMatrices& sys_g, const SystemMatrices& sys_star);

/// Spectral radius of q_bar, via rho = 1 - lambda_min(m_bar)/(2 alpha).
/// lambda_min_sym and lambda2_laplacian live in spectral.hpp.
double spectral_radius_qbar(const ExpectedUpdate& upd);

} // namespace gossip
