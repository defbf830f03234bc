#include "gossip/regimes.hpp"
#include "gossip/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gossip {

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::polarization_limit: return "polarization_limit";
        case Regime::consensus_limit: return "consensus_limit";
        case Regime::block_limit: return "block_limit";
        case Regime::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

Eigen::VectorXd large_influence_limit(const Eigen::MatrixXd& psi_s, const Eigen::VectorXd& z_s) {
    if (psi_s.cols() != z_s.size())
        throw DomainError("large_influence_limit: psi_s and z have mismatched dimensions");
    Eigen::VectorXd out(psi_s.rows());
    for (Eigen::Index i = 0; i < psi_s.rows(); ++i) {
        const double row_sum = psi_s.row(i).sum();
        if (!(row_sum > 0.0))
            throw DomainError("large_influence_limit: regular agent " + std::to_string(i + 1) +
                              " has zero expected stubborn degree; use block_limit");
        out(i) = psi_s.row(i).dot(z_s) / row_sum;
    }
    return out;
}

Eigen::VectorXd block_limit(const SystemMatrices& sys_star, const Eigen::VectorXd& z_s) {
    if (sys_star.kind != SystemKind::expected)
        throw DomainError("block_limit expects the expected-graph system");
    if (sys_star.u_bar.cols() != z_s.size())
        throw DomainError("block_limit: stubborn vector has wrong length");
    const int n_r = sys_star.n_r();

    // Stable partition: positive expected stubborn degree first.
    std::vector<int> pos, zero;
    for (int i = 0; i < n_r; ++i) {
        if (sys_star.u_bar.cols() > 0 && sys_star.u_bar.row(i).sum() > 0.0)
            pos.push_back(i);
        else
            zero.push_back(i);
    }
    const int n1 = static_cast<int>(pos.size());
    const int n2 = static_cast<int>(zero.size());
    if (n1 == 0)
        throw DomainError("block_limit: no regular agent has positive expected stubborn degree");

    Eigen::MatrixXd psi_plus(n1, z_s.size());
    for (int a = 0; a < n1; ++a)
        psi_plus.row(a) = sys_star.u_bar.row(pos[a]);

    Eigen::VectorXd out(n_r);
    const Eigen::VectorXd top = large_influence_limit(psi_plus, z_s);
    for (int a = 0; a < n1; ++a)
        out(pos[a]) = top(a);
    if (n2 == 0)
        return out;

    // Lower-left block of the inverse of [A B; B^T C] applied to psi_plus z:
    // -C^{-1} B^T (A - B C^{-1} B^T)^{-1} w, with the partition above.
    Eigen::MatrixXd a11(n1, n1), b12(n1, n2), c22(n2, n2);
    for (int a = 0; a < n1; ++a) {
        for (int b = 0; b < n1; ++b) a11(a, b) = sys_star.m_bar(pos[a], pos[b]);
        for (int b = 0; b < n2; ++b) b12(a, b) = sys_star.m_bar(pos[a], zero[b]);
    }
    for (int a = 0; a < n2; ++a)
        for (int b = 0; b < n2; ++b) c22(a, b) = sys_star.m_bar(zero[a], zero[b]);

    Eigen::LDLT<Eigen::MatrixXd> c_fact(c22);
    const double c_scale = std::max(c22.diagonal().maxCoeff(), 1.0);
    if (c_fact.info() != Eigen::Success || c_fact.vectorD().minCoeff() < 1e-12 * c_scale)
        throw SingularError("block_limit: zero-stubborn block of the system matrix is singular");

    const Eigen::MatrixXd schur = a11 - b12 * c_fact.solve(b12.transpose());
    Eigen::LDLT<Eigen::MatrixXd> s_fact(schur);
    const double s_scale = std::max(schur.diagonal().maxCoeff(), 1.0);
    if (s_fact.info() != Eigen::Success || s_fact.vectorD().minCoeff() < 1e-12 * s_scale)
        throw SingularError("block_limit: Schur complement is singular");

    const Eigen::VectorXd w = psi_plus * z_s;
    const Eigen::VectorXd bottom = -c_fact.solve(b12.transpose() * s_fact.solve(w));
    for (int a = 0; a < n2; ++a)
        out(zero[a]) = bottom(a);
    return out;
}

double consensus_value(const Eigen::MatrixXd& psi_s, const Eigen::VectorXd& z_s,
                       double lambda1_mstar, int n_r) {
    if (!(lambda1_mstar > 0.0))
        throw DomainError("consensus_value: lambda1 must be positive");
    if (psi_s.cols() != z_s.size())
        throw DomainError("consensus_value: psi_s and z have mismatched dimensions");
    const double mass = (psi_s * z_s).sum();
    return mass / (static_cast<double>(n_r) * lambda1_mstar);
}

namespace {

/// LHS/RHS with guards: positive/0 -> inf, 0/0 -> 0.
double ratio(double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

} // namespace

ProfileVerdict regime_diagnostics(const DegreeSummary& ds, double lambda1_mstar,
                                  double lambda2_lstar, double c_m, double threshold,
                                  std::optional<BlockSpectra> block) {
    if (!(c_m > 0.0 && c_m < 1.0))
        throw DomainError("c_m must lie in (0,1)");
    if (!(threshold > 1.0))
        throw DomainError("threshold must exceed 1");

    ProfileVerdict v;
    v.c_m = c_m;
    v.threshold = threshold;

    const double n = static_cast<double>(ds.n());
    const double ln = std::log(n);
    const double drs_sr = std::max(ds.delta_rs_max, ds.delta_sr_max);
    const double sqrt_dr_ln = std::sqrt(ds.delta_r_max * ln);

    // Large stubborn influence on the expected and realized graphs.
    v.ratios["large_influence_expected"] =
        ratio(ds.delta_rs_min, std::max(1.0, std::sqrt(ds.delta_rr_max * drs_sr)));
    v.ratios["large_influence_sampled"] = ratio(
        ds.delta_rs_min,
        std::max(ln, std::sqrt(drs_sr * std::max(sqrt_dr_ln, ds.delta_rr_max))));

    // Small stubborn influence: spectral gap conditions.
    v.ratios["small_influence_lambda1_expected"] = ratio(lambda1_mstar, std::pow(drs_sr, c_m));
    v.ratios["small_influence_lambda2_expected"] =
        ratio(lambda2_lstar, std::max(1.0, std::pow(drs_sr, 2.0 - c_m)));
    v.ratios["small_influence_lambda1_sampled"] = ratio(
        lambda1_mstar,
        std::max({std::pow(drs_sr, c_m), sqrt_dr_ln, std::sqrt(sqrt_dr_ln * drs_sr)}));
    v.ratios["small_influence_lambda2_sampled"] =
        ratio(lambda2_lstar, std::pow(drs_sr, 2.0 - c_m));

    // Partitioned variant when some agents lack stubborn attachment.
    const bool block_shape = ds.delta_rs_min == 0.0 && ds.n_r1 > 0 && ds.n_r2 > 0;
    if (block_shape) {
        double rhs = std::max(1.0, std::sqrt(ds.delta_rr_max_pos * drs_sr));
        if (block && block->lambda1_m22 > 0.0)
            rhs = std::max(rhs, block->m21_norm * std::sqrt(drs_sr / block->lambda1_m22));
        v.ratios["block_influence"] = ratio(ds.delta_rs_min_pos, rhs);
        if (block) v.ratios["block_lambda1_m22"] = block->lambda1_m22;
    }

    const auto passes = [&](const char* key) {
        const auto it = v.ratios.find(key);
        return it != v.ratios.end() && it->second > threshold;
    };

    // The verdict gates on the expected-graph conditions; the sampled-graph
    // analogues carry extra log-n factors that dwarf any fixed threshold until
    // n is enormous, so they ship as ratios but stay advisory.
    const bool polarization = ds.delta_rs_min > 0.0 && passes("large_influence_expected");
    const bool consensus = passes("small_influence_lambda1_expected") &&
                           passes("small_influence_lambda2_expected");
    const bool blocked = block_shape && passes("block_influence") &&
                         (!block || block->lambda1_m22 > 0.0);

    if (polarization)
        v.regime = Regime::polarization_limit;
    else if (blocked)
        v.regime = Regime::block_limit;
    else if (consensus)
        v.regime = Regime::consensus_limit;
    else
        v.regime = Regime::indeterminate;
    return v;
}

std::string ProfileVerdict::to_json(const std::string& limit_vector_path) const {
    nlohmann::json doc;
    doc["regime"] = regime_name(regime);
    doc["c_M"] = c_m;
    doc["threshold"] = threshold;
    doc["ratios"] = ratios;
    if (gamma_n) doc["gamma_n"] = *gamma_n;
    if (residual) doc["residual"] = *residual;
    if (!limit_vector_path.empty()) doc["limit_vector_path"] = limit_vector_path;
    return doc.dump(2);
}

} // namespace gossip
