#pragma once

#include <Eigen/Dense>

namespace gossip {

/// Largest singular value by power iteration on A^T A.
/// Deterministic start vector; stops at relative tolerance or max_iter.
double spectral_norm(const Eigen::MatrixXd& a, double rel_tol = 1e-10, int max_iter = 10000);

/// Smallest eigenvalue of a symmetric matrix. Positive definite inputs use
/// factorized inverse iteration; otherwise falls back to a full symmetric
/// eigensolve. Throws DomainError on non-symmetric input.
double lambda_min_sym(const Eigen::MatrixXd& m, double rel_tol = 1e-9);

/// Second-smallest eigenvalue of a graph Laplacian (algebraic connectivity).
/// Returns 0 for disconnected graphs. Throws DomainError if the input is not
/// symmetric with zero row sums.
double lambda2_laplacian(const Eigen::MatrixXd& l, double rel_tol = 1e-9);

} // namespace gossip
