#include "gossip/solver.hpp"
#include "gossip/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace gossip {

namespace {

constexpr int kDenseSolveLimit = 10000;
constexpr double kResidualTol = 1e-10;
constexpr double kPivotRel = 1e-12;

[[noreturn]] void throw_singular(const SystemMatrices& sys) {
    // Identify a responsible component when the structure explains it.
    std::vector<int> parent(sys.n_r());
    for (int i = 0; i < sys.n_r(); ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) { parent[x] = parent[parent[x]]; x = parent[x]; }
        return x;
    };
    for (int i = 0; i < sys.n_r(); ++i)
        for (int j = i + 1; j < sys.n_r(); ++j)
            if (sys.m_bar(i, j) != 0.0) {
                const int a = find(i), b = find(j);
                if (a != b) parent[a] = b;
            }
    std::vector<double> stubborn_mass(sys.n_r(), 0.0);
    std::vector<int> size(sys.n_r(), 0);
    const Eigen::VectorXd row_sums =
        sys.n_s() > 0 ? Eigen::VectorXd(sys.u_bar.rowwise().sum())
                      : Eigen::VectorXd::Zero(sys.n_r());
    for (int i = 0; i < sys.n_r(); ++i) {
        const int root = find(i);
        stubborn_mass[root] += row_sums(i);
        size[root] += 1;
    }
    for (int i = 0; i < sys.n_r(); ++i) {
        if (find(i) == i && stubborn_mass[i] == 0.0) {
            std::ostringstream msg;
            msg << "system is singular: the component containing regular agent " << (i + 1)
                << " (" << size[i] << " agents) has no stubborn attachment";
            throw SingularError(msg.str());
        }
    }
    throw SingularError("system matrix is singular or indefinite");
}

} // namespace

ExpectedUpdate build_expected_update(const SystemMatrices& sys) {
    if (!(sys.alpha > 0.0))
        throw DomainError("expected update undefined on an empty graph (alpha = 0)");
    ExpectedUpdate upd;
    upd.alpha = sys.alpha;
    const double inv = 1.0 / (2.0 * sys.alpha);
    upd.q_bar = Eigen::MatrixXd::Identity(sys.n_r(), sys.n_r()) - inv * sys.m_bar;
    upd.r_bar = inv * sys.u_bar;
    return upd;
}

Eigen::MatrixXd solve_system(const SystemMatrices& sys, const Eigen::MatrixXd& rhs) {
    if (rhs.rows() != sys.m_bar.rows())
        throw DomainError("solve_system: right-hand side has wrong row count");
    const double rhs_norm = rhs.norm();

    if (sys.n_r() > kDenseSolveLimit) {
        Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>>
            cg;
        cg.setTolerance(kResidualTol);
        cg.setMaxIterations(20L * sys.n_r());
        cg.compute(sys.m_bar);
        Eigen::MatrixXd x = cg.solve(rhs);
        if (cg.info() != Eigen::Success)
            throw_singular(sys);
        return x;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.m_bar);
    const double max_diag = std::max(sys.m_bar.diagonal().maxCoeff(), 1.0);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < kPivotRel * max_diag)
        throw_singular(sys);

    Eigen::MatrixXd x = ldlt.solve(rhs);
    // One step of iterative refinement keeps the residual contract with
    // plenty of slack.
    Eigen::MatrixXd r = rhs - sys.m_bar * x;
    if (rhs_norm > 0.0 && r.norm() > kResidualTol * rhs_norm) {
        x += ldlt.solve(r);
        r = rhs - sys.m_bar * x;
        if (r.norm() > kResidualTol * rhs_norm)
            throw SingularError("solver residual above tolerance after refinement");
    }
    return x;
}

OpinionSolution expected_final_opinions(const SystemMatrices& sys, const Eigen::VectorXd& z_s) {
    if (z_s.size() != sys.u_bar.cols())
        throw DomainError("stubborn opinion vector has wrong length");
    OpinionSolution sol;
    sol.kind = sys.kind;
    const Eigen::VectorXd rhs = sys.n_s() > 0 ? Eigen::VectorXd(sys.u_bar * z_s)
                                              : Eigen::VectorXd::Zero(sys.n_r());
    sol.x = solve_system(sys, rhs);
    const double rhs_norm = rhs.norm();
    sol.solver_residual =
        rhs_norm > 0.0 ? (sys.m_bar * sol.x - rhs).norm() / rhs_norm : 0.0;
    sol.lambda_min_m = lambda_min_sym(sys.m_bar);
    return sol;
}

double empirical_deviation(const SystemMatrices& sys_g, const SystemMatrices& sys_star) {
    if (sys_g.n_r() != sys_star.n_r() || sys_g.n_s() != sys_star.n_s())
        throw DomainError("empirical_deviation: mismatched system dimensions");
    const Eigen::MatrixXd diff =
        solve_system(sys_g, sys_g.u_bar) - solve_system(sys_star, sys_star.u_bar);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(diff);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double spectral_radius_qbar(const ExpectedUpdate& upd) {
    const Eigen::MatrixXd m =
        2.0 * upd.alpha *
        (Eigen::MatrixXd::Identity(upd.q_bar.rows(), upd.q_bar.cols()) - upd.q_bar);
    return 1.0 - lambda_min_sym(m) / (2.0 * upd.alpha);
}

} // namespace gossip
