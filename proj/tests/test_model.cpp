#include "gossip/errors.hpp"
#include "gossip/model.hpp"

#include <doctest.h>

#include <cmath>

using namespace gossip;

TEST_SUITE("model") {

TEST_CASE("er link matrix") {
    SUBCASE("p = 0 gives the empty graph") {
        const auto psi = build_er_psi(3, 0.0);
        CHECK(psi.matrix().isZero(0.0));
    }
    SUBCASE("p = 1 on two agents is the single edge") {
        const auto psi = build_er_psi(2, 1.0);
        CHECK(psi(0, 1) == 1.0);
        CHECK(psi(1, 0) == 1.0);
        CHECK(psi(0, 0) == 0.0);
    }
    SUBCASE("off-diagonal constant") {
        const auto psi = build_er_psi(4, 0.5);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(psi(i, j) == (i == j ? 0.0 : 0.5));
    }
    SUBCASE("invalid probability rejected") {
        CHECK_THROWS_AS(build_er_psi(3, 1.5), ModelError);
        CHECK_THROWS_AS(build_er_psi(3, -0.1), ModelError);
        CHECK_THROWS_AS(build_er_psi(0, 0.5), ModelError);
    }
}

TEST_CASE("chung-lu link matrix") {
    SUBCASE("equal weights") {
        const auto psi = build_chung_lu_psi({1, 1, 1, 1});
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(psi(i, j) == doctest::Approx(i == j ? 0.0 : 0.25).epsilon(1e-15));
    }
    SUBCASE("zero weight isolates the agent") {
        // strict degree condition forces the positive weight below one here
        const auto psi = build_chung_lu_psi({0, 0.5});
        CHECK(psi(0, 1) == 0.0);
    }
    SUBCASE("w = (2,2,2): psi = 4/6") {
        const auto psi = build_chung_lu_psi({2, 2, 2});
        CHECK(psi(0, 1) == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
    }
    SUBCASE("degree condition is strict and names the index") {
        // max w^2 = 9 >= sum w = 4
        CHECK_THROWS_WITH_AS(build_chung_lu_psi({3, 1}), doctest::Contains("index 1"),
                             ModelError);
        // boundary: w = (2,2) has w^2 = 4 = sum, not < sum
        CHECK_THROWS_AS(build_chung_lu_psi({2, 2}), ModelError);
    }
    SUBCASE("negative weight rejected") {
        CHECK_THROWS_AS(build_chung_lu_psi({-1, 2}), ModelError);
    }
}

TEST_CASE("sbm model") {
    SUBCASE("one regular community of two") {
        Eigen::MatrixXd pi(1, 1);
        pi << 1.0;
        const RgsModel m = build_sbm_model({2}, pi, {false});
        CHECK(m.n_r == 2);
        CHECK(m.n_s == 0);
        CHECK(m.psi_r(0, 1) == 1.0);
    }
    SUBCASE("two singleton communities, second stubborn") {
        Eigen::MatrixXd pi(2, 2);
        pi << 0, 1, 1, 0;
        const RgsModel m = build_sbm_model({1, 1}, pi, {false, true});
        CHECK(m.n_r == 1);
        CHECK(m.n_s == 1);
        CHECK(m.psi_s.rows() == 1);
        CHECK(m.psi_s(0, 0) == 1.0);
    }
    SUBCASE("stubborn community listed first is moved after regular ones") {
        Eigen::MatrixXd pi(2, 2);
        pi << 0, 0.5, 0.5, 0.25;
        const RgsModel m = build_sbm_model({2, 3}, pi, {true, false});
        CHECK(m.n_r == 3);
        CHECK(m.n_s == 2);
        CHECK(m.psi_r(0, 1) == 0.25);
        CHECK(m.psi_s(0, 0) == 0.5);
        const auto labels = sbm_community_labels({2, 3}, {true, false});
        CHECK(labels[0] == 1); // regular agents first, carrying community id 1
        CHECK(labels[3] == 0);
    }
    SUBCASE("five-community configuration at n = 2000") {
        const int n = 2000;
        const double ln = std::log(static_cast<double>(n));
        const double p1 = ln * ln / n;
        const double p2 = std::pow(ln, 1.1) / n;
        const double p3 = std::pow(ln, 2.0) / n;
        Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(5, 5);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                pi(a, b) = a == b ? p1 : p2;
        pi(0, 3) = pi(3, 0) = p3;
        pi(2, 4) = pi(4, 2) = p3;
        pi(3, 4) = pi(4, 3) = 0.7; // stubborn-stubborn entries are ignored
        const RgsModel m =
            build_sbm_model({600, 600, 600, 100, 100}, pi, {false, false, false, true, true});
        CHECK(m.n() == 2000);
        CHECK(m.n_r == 1800);
        CHECK(m.n_s == 200);
        CHECK(m.psi_r(0, 1) == p1);       // same community
        CHECK(m.psi_r(0, 600) == p2);     // across regular communities
        CHECK(m.psi_s(0, 0) == p3);       // community 1 -> stubborn community 1
        CHECK(m.psi_s(0, 100) == 0.0);    // community 1 never reaches stubborn 2
        CHECK(m.psi_s(700, 0) == 0.0);    // middle community detached by default
        CHECK(m.psi_s(1200, 100) == p3);  // community 3 -> stubborn community 2
    }
    SUBCASE("dimension mismatch rejected") {
        Eigen::MatrixXd pi(2, 2);
        pi << 0, 1, 1, 0;
        CHECK_THROWS_AS(build_sbm_model({1, 1, 1}, pi, {false, false, true}), ModelError);
    }
}

TEST_CASE("model json round trip") {
    Eigen::MatrixXd pi(2, 2);
    pi << 0.2, 0.7, 0.7, 0.0;
    const RgsModel m = build_sbm_model({3, 2}, pi, {false, true});

    const std::string path = "model_roundtrip_test.json";
    save_model(m, path);
    const RgsModel loaded = load_model(path);
    CHECK(loaded.n_r == m.n_r);
    CHECK(loaded.n_s == m.n_s);
    CHECK((loaded.psi_r.matrix() - m.psi_r.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.psi_s - m.psi_s).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("model json shapes") {
    SUBCASE("sbm shorthand") {
        const RgsModel m = parse_model_json(R"({
            "sizes": [2, 1],
            "pi": [[0.5, 1.0], [1.0, 0.0]],
            "stubborn_flags": [false, true],
            "description": "toy"
        })");
        CHECK(m.n_r == 2);
        CHECK(m.n_s == 1);
        CHECK(m.psi_r(0, 1) == 0.5);
        CHECK(m.psi_s(0, 0) == 1.0);
        CHECK(m.description == "toy");
    }
    SUBCASE("psi_r block spec") {
        const RgsModel m = parse_model_json(R"({
            "n_r": 4, "n_s": 1,
            "psi_r": {"sizes": [2, 2], "pi": [[0.9, 0.1], [0.1, 0.8]]},
            "psi_s": [[1.0], [1.0], [0.0], [0.0]]
        })");
        CHECK(m.psi_r(0, 1) == 0.9);
        CHECK(m.psi_r(0, 2) == 0.1);
        CHECK(m.psi_r(2, 3) == 0.8);
    }
    SUBCASE("bad json rejected") {
        CHECK_THROWS_AS(parse_model_json("{not json"), ModelError);
        CHECK_THROWS_AS(parse_model_json(R"({"n_r": 1, "n_s": 0, "psi_r": [[0.0, 0.5]]})"),
                        ModelError);
    }
    SUBCASE("asymmetric psi_r rejected") {
        CHECK_THROWS_AS(
            parse_model_json(
                R"({"n_r": 2, "n_s": 0, "psi_r": [[0.0, 0.5], [0.4, 0.0]]})"),
            ModelError);
    }
}

} // TEST_SUITE
