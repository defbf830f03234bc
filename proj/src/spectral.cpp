#include "gossip/spectral.hpp"
#include "gossip/errors.hpp"
#include "gossip/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace gossip {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols())
        throw DomainError(std::string(what) + ": matrix must be square");
    // Exact symmetry is expected from our own assembly; allow roundoff slack
    // for matrices built by callers.
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DomainError(std::string(what) + ": matrix must be symmetric");
}

Eigen::VectorXd deterministic_start(Eigen::Index n) {
    // Ones plus a keyed perturbation so we are never orthogonal to the
    // dominant subspace by symmetry.
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = 1.0 + 0.25 * u01(mix64(0x5EEDF00DULL + static_cast<std::uint64_t>(i)));
    return v / v.norm();
}

} // namespace

double spectral_norm(const Eigen::MatrixXd& a, double rel_tol, int max_iter) {
    if (a.size() == 0) return 0.0;
    const Eigen::Index n = a.cols();
    Eigen::VectorXd v = deterministic_start(n);
    double sigma2 = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd w = a.transpose() * (a * v);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0; // v in the null space; matrix may still be 0
        const double next = v.dot(w); // Rayleigh quotient for A^T A
        v = w / norm;
        if (it > 0 && std::abs(next - sigma2) <= rel_tol * std::abs(next)) {
            sigma2 = next;
            break;
        }
        sigma2 = next;
    }
    return std::sqrt(std::max(sigma2, 0.0));
}

double lambda_min_sym(const Eigen::MatrixXd& m, double rel_tol) {
    require_symmetric(m, "lambda_min");
    const Eigen::Index n = m.rows();
    if (n == 0)
        throw DomainError("lambda_min: empty matrix");

    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    bool usable = ldlt.info() == Eigen::Success;
    if (usable) {
        const double max_diag = std::max(m.diagonal().maxCoeff(), 0.0);
        const double min_pivot = ldlt.vectorD().minCoeff();
        usable = min_pivot > 1e-12 * std::max(max_diag, 1.0);
    }
    if (!usable) {
        // Not (numerically) positive definite: exact dense solve.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    Eigen::VectorXd v = deterministic_start(n);
    double lambda = v.dot(m * v);
    // successive Rayleigh differences under-estimate the remaining error, so
    // extrapolate it from the observed contraction rate; a stalled iteration
    // (tiny eigengap) falls back to the exact dense solve
    double prev_diff = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXd w = ldlt.solve(v);
        w /= w.norm();
        const double next = w.dot(m * w);
        v = w;
        const double diff = std::abs(next - lambda);
        lambda = next;
        const double scale = std::max(std::abs(lambda), 1e-300);
        if (diff <= 1e-2 * rel_tol * scale) {
            const double rate = prev_diff > 0 ? std::min(diff / prev_diff, 0.999) : 0.0;
            if (diff * rate / (1.0 - rate) <= rel_tol * scale)
                return lambda;
        }
        prev_diff = diff;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double lambda2_laplacian(const Eigen::MatrixXd& l, double rel_tol) {
    require_symmetric(l, "lambda2");
    const Eigen::Index n = l.rows();
    if (n == 0)
        throw DomainError("lambda2: empty matrix");
    const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());
    if ((l * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() > 1e-9 * scale * n)
        throw DomainError("lambda2: not a Laplacian (row sums must vanish)");
    if (n == 1) return 0.0;

    // Shift the all-ones kernel direction away from zero, then run inverse
    // iteration restricted to the complement of the constant vector.
    const double shift = l.diagonal().mean() + 1.0;
    const Eigen::MatrixXd k =
        l + (shift / static_cast<double>(n)) * Eigen::MatrixXd::Ones(n, n);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
    const double min_pivot = ldlt.info() == Eigen::Success
                                 ? ldlt.vectorD().minCoeff()
                                 : -1.0;
    if (min_pivot <= 1e-12 * std::max(scale, 1.0))
        return 0.0; // singular on the complement: disconnected

    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    auto deflate = [&](Eigen::VectorXd& v) { v -= (ones.dot(v) / n) * ones; };

    Eigen::VectorXd v = deterministic_start(n);
    deflate(v);
    v /= v.norm();
    double lambda = v.dot(l * v);
    double prev_diff = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXd w = ldlt.solve(v);
        deflate(w);
        const double norm = w.norm();
        if (norm == 0.0) break;
        w /= norm;
        const double next = w.dot(l * w);
        v = w;
        const double diff = std::abs(next - lambda);
        lambda = next;
        const double sc = std::max(std::abs(lambda), 1e-300);
        if (diff <= 1e-2 * rel_tol * sc) {
            const double rate = prev_diff > 0 ? std::min(diff / prev_diff, 0.999) : 0.0;
            if (diff * rate / (1.0 - rate) <= rel_tol * sc)
                return std::max(lambda, 0.0);
        }
        prev_diff = diff;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l, Eigen::EigenvaluesOnly);
    return std::max(es.eigenvalues()(1), 0.0);
}

} // namespace gossip
