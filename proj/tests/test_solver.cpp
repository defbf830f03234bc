#include "gossip/errors.hpp"
#include "gossip/rng.hpp"
#include "gossip/solver.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>

using namespace gossip;

namespace {

RgsModel uniform_model(int n_r, int n_s, double p_r, double p_s) {
    RgsModel m;
    m.n_r = n_r;
    m.n_s = n_s;
    m.psi_r = build_er_psi(n_r, p_r);
    m.psi_s = Eigen::MatrixXd::Constant(n_r, n_s, p_s);
    return m;
}

SampledGraph graph_from_edges(int n_r, int n_s, std::vector<Edge> edges) {
    SampledGraph g;
    g.n_r = n_r;
    g.n_s = n_s;
    g.edges = std::move(edges);
    g.neighbors.resize(n_r + n_s);
    for (const auto& [i, j] : g.edges) {
        g.neighbors[i].push_back(j);
        g.neighbors[j].push_back(i);
    }
    return g;
}

/// Random model in which every regular agent has some stubborn attachment.
RgsModel random_attached_model(SplitMix64& rng, int max_nr = 20) {
    const int n_r = 2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_nr - 1));
    const int n_s = 1 + static_cast<int>(rng.next() % 3ULL);
    Eigen::MatrixXd pr = Eigen::MatrixXd::Zero(n_r, n_r);
    for (int i = 0; i < n_r; ++i)
        for (int j = i + 1; j < n_r; ++j)
            pr(i, j) = pr(j, i) = rng.next_u01() < 0.5 ? rng.next_u01() : 0.0;
    Eigen::MatrixXd ps(n_r, n_s);
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < n_s; ++j)
            ps(i, j) = rng.next_u01();
    for (int i = 0; i < n_r; ++i)
        ps(i, 0) = std::max(ps(i, 0), 0.05); // keep the expected system nonsingular
    RgsModel m;
    m.n_r = n_r;
    m.n_s = n_s;
    m.psi_r = LinkProbabilityMatrix(pr);
    m.psi_s = ps;
    return m;
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("expected update matrices") {
    const SampledGraph g = graph_from_edges(2, 2, {{0, 1}, {0, 2}, {1, 3}});
    const SystemMatrices sys = assemble_system(g);
    const ExpectedUpdate upd = build_expected_update(sys);
    Eigen::MatrixXd q_expect(2, 2);
    q_expect << 1.0 - 2.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 - 2.0 / 6.0;
    CHECK((upd.q_bar - q_expect).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((upd.r_bar - Eigen::MatrixXd::Identity(2, 2) / 6.0).cwiseAbs().maxCoeff() < 1e-15);

    SUBCASE("single regular-stubborn edge") {
        const SampledGraph tiny = graph_from_edges(1, 1, {{0, 1}});
        const ExpectedUpdate u = build_expected_update(assemble_system(tiny));
        CHECK(u.q_bar(0, 0) == 0.5);
        CHECK(u.r_bar(0, 0) == 0.5);
    }
    SUBCASE("empty graph rejected") {
        const SampledGraph empty = graph_from_edges(2, 0, {});
        CHECK_THROWS_AS(build_expected_update(assemble_system(empty)), DomainError);
    }
}

TEST_CASE("update rows are stochastic on random samples") {
    SplitMix64 rng(505);
    for (int rep = 0; rep < 100; ++rep) {
        const RgsModel m = random_attached_model(rng);
        const SampledGraph g = sample_graph(m, rng.next());
        if (g.edge_count() == 0) continue;
        const ExpectedUpdate upd = build_expected_update(assemble_system(g));
        const Eigen::VectorXd ones =
            upd.q_bar.rowwise().sum() +
            (m.n_s > 0 ? Eigen::VectorXd(upd.r_bar.rowwise().sum())
                       : Eigen::VectorXd::Zero(m.n_r));
        CHECK((ones - Eigen::VectorXd::Ones(m.n_r)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(upd.q_bar.minCoeff() >= 0.0);
    }
}

TEST_CASE("expected final opinions") {
    SUBCASE("one regular agent between two stubborn agents") {
        const SampledGraph g = graph_from_edges(1, 2, {{0, 1}, {0, 2}});
        Eigen::VectorXd z(2);
        z << 1.0, 0.0;
        const OpinionSolution sol = expected_final_opinions(assemble_system(g), z);
        CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(sol.solver_residual <= 1e-10);
    }
    SUBCASE("hand-solved two-by-two system") {
        const SampledGraph g = graph_from_edges(2, 2, {{0, 1}, {0, 2}, {1, 3}});
        Eigen::VectorXd z(2);
        z << 1.0, 0.0;
        const OpinionSolution sol = expected_final_opinions(assemble_system(g), z);
        CHECK(sol.x[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
        CHECK(sol.x[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
        CHECK(sol.lambda_min_m == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("singular system names a detached component") {
        // regular agent 2 is isolated from every stubborn agent
        const SampledGraph g = graph_from_edges(2, 1, {{0, 2}});
        Eigen::VectorXd z(1);
        z << 1.0;
        CHECK_THROWS_WITH_AS(expected_final_opinions(assemble_system(g), z),
                             doctest::Contains("agent 2"), SingularError);
    }
}

TEST_CASE("solution operator is row stochastic") {
    SplitMix64 rng(707);
    for (int rep = 0; rep < 20; ++rep) {
        const RgsModel m = random_attached_model(rng);
        const SystemMatrices sys = assemble_system(expected_graph(m));
        // z = 1 must map to x = 1
        const OpinionSolution unit =
            expected_final_opinions(sys, Eigen::VectorXd::Ones(m.n_s));
        CHECK((unit.x - Eigen::VectorXd::Ones(m.n_r)).cwiseAbs().maxCoeff() < 1e-10);
        // columns of the solution operator are nonnegative
        const Eigen::MatrixXd op = solve_system(sys, sys.u_bar);
        CHECK(op.minCoeff() > -1e-12);
        // hull property for a random stubborn vector
        Eigen::VectorXd z(m.n_s);
        for (int j = 0; j < m.n_s; ++j) z[j] = rng.next_uniform(-2.0, 3.0);
        const OpinionSolution sol = expected_final_opinions(sys, z);
        CHECK(sol.x.minCoeff() >= z.minCoeff() - 1e-10);
        CHECK(sol.x.maxCoeff() <= z.maxCoeff() + 1e-10);
    }
}

TEST_CASE("direct solve agrees with the update-matrix route") {
    SplitMix64 rng(909);
    for (int rep = 0; rep < 20; ++rep) {
        const RgsModel m = random_attached_model(rng);
        const SampledGraph g = sample_graph(m, rng.next());
        if (!stubborn_reachability(g).all_touch_stubborn()) continue;
        const SystemMatrices sys = assemble_system(g);
        Eigen::VectorXd z(m.n_s);
        for (int j = 0; j < m.n_s; ++j) z[j] = rng.next_u01();
        const OpinionSolution sol = expected_final_opinions(sys, z);
        const ExpectedUpdate upd = build_expected_update(sys);
        const Eigen::MatrixXd i_minus_q =
            Eigen::MatrixXd::Identity(m.n_r, m.n_r) - upd.q_bar;
        const Eigen::VectorXd via_update =
            Eigen::PartialPivLU<Eigen::MatrixXd>(i_minus_q).solve(upd.r_bar * z);
        CHECK((sol.x - via_update).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("empirical deviation") {
    SUBCASE("identical systems deviate by zero") {
        const RgsModel m = uniform_model(8, 2, 0.6, 0.7);
        const SystemMatrices sys = assemble_system(expected_graph(m));
        CHECK(empirical_deviation(sys, sys) == 0.0);
    }
    SUBCASE("deterministic model: the sample equals its expectation") {
        const RgsModel m = uniform_model(6, 2, 1.0, 1.0);
        const SystemMatrices sys_g = assemble_system(sample_graph(m, 17));
        const SystemMatrices sys_star = assemble_system(expected_graph(m));
        CHECK(empirical_deviation(sys_g, sys_star) < 1e-12);
    }
}

TEST_CASE("eigenvalue helpers") {
    SUBCASE("two-agent system matrix") {
        Eigen::MatrixXd m(2, 2);
        m << 2, -1, -1, 2;
        CHECK(lambda_min_sym(m) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("single-edge laplacian has connectivity two") {
        Eigen::MatrixXd l(2, 2);
        l << 1, -1, -1, 1;
        CHECK(lambda2_laplacian(l) == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("disconnected laplacian has zero connectivity") {
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(4, 4);
        l(0, 0) = l(1, 1) = 1.0;
        l(0, 1) = l(1, 0) = -1.0;
        l(2, 2) = l(3, 3) = 1.0;
        l(2, 3) = l(3, 2) = -1.0;
        CHECK(lambda2_laplacian(l) == 0.0);
    }
    SUBCASE("non-symmetric input rejected") {
        Eigen::MatrixXd m(2, 2);
        m << 1, 2, 3, 4;
        CHECK_THROWS_AS(lambda_min_sym(m), DomainError);
        CHECK_THROWS_AS(lambda2_laplacian(m), DomainError);
    }
    SUBCASE("matches a full eigensolve on random symmetric matrices") {
        SplitMix64 rng(321);
        for (int rep = 0; rep < 10; ++rep) {
            Eigen::MatrixXd a(6, 6);
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 6; ++j)
                    a(i, j) = rng.next_uniform(-1.0, 1.0);
            const Eigen::MatrixXd sym = 0.5 * (a + a.transpose()).eval() +
                                        6.0 * Eigen::MatrixXd::Identity(6, 6);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
            CHECK(lambda_min_sym(sym) ==
                  doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-8));
        }
    }
}

TEST_CASE("spectral radius of the expected update") {
    const RgsModel m = uniform_model(10, 3, 0.5, 0.6);
    const SampledGraph g = sample_graph(m, 3);
    const SystemMatrices sys = assemble_system(g);
    const ExpectedUpdate upd = build_expected_update(sys);
    const double rho = spectral_radius_qbar(upd);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(upd.q_bar, Eigen::EigenvaluesOnly);
    const double want = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(rho == doctest::Approx(want).epsilon(1e-9));
    CHECK(rho < 1.0);
}

TEST_CASE("spectral radius reaches one exactly when a component detaches") {
    // connected-to-stubborn: rho < 1 and lambda_min > 0
    const SampledGraph attached = graph_from_edges(2, 1, {{0, 1}, {0, 2}});
    const SystemMatrices sys_a = assemble_system(attached);
    CHECK(lambda_min_sym(sys_a.m_bar) > 0.0);
    CHECK(spectral_radius_qbar(build_expected_update(sys_a)) < 1.0);

    // detached regular component: singular system, rho = 1
    const SampledGraph detached = graph_from_edges(3, 1, {{0, 1}, {0, 3}});
    const SystemMatrices sys_d = assemble_system(detached);
    CHECK(lambda_min_sym(sys_d.m_bar) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(spectral_radius_qbar(build_expected_update(sys_d)) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

} // TEST_SUITE
