#include "gossip/system.hpp"
#include "gossip/errors.hpp"
#include "gossip/spectral.hpp"

#include <limits>

namespace gossip {

SystemMatrices assemble_system(const SampledGraph& g) {
    if (g.n() > 20000)
        throw DomainError("dense system assembly refused for n > 20000");
    SystemMatrices sys;
    sys.kind = SystemKind::sampled;
    sys.alpha = static_cast<double>(g.edge_count());
    sys.m_bar = Eigen::MatrixXd::Zero(g.n_r, g.n_r);
    sys.l_bar = Eigen::MatrixXd::Zero(g.n_r, g.n_r);
    sys.u_bar = Eigen::MatrixXd::Zero(g.n_r, g.n_s);
    for (const auto& [i, j] : g.edges) {
        if (j < g.n_r) {
            sys.m_bar(i, j) -= 1.0;
            sys.m_bar(j, i) -= 1.0;
            sys.m_bar(i, i) += 1.0;
            sys.m_bar(j, j) += 1.0;
            sys.l_bar(i, j) -= 1.0;
            sys.l_bar(j, i) -= 1.0;
            sys.l_bar(i, i) += 1.0;
            sys.l_bar(j, j) += 1.0;
        } else if (i < g.n_r) {
            sys.m_bar(i, i) += 1.0;
            sys.u_bar(i, j - g.n_r) = 1.0;
        }
    }
    return sys;
}

SystemMatrices assemble_system(const ExpectedGraph& g) {
    if (g.n() > 20000)
        throw DomainError("dense system assembly refused for n > 20000");
    SystemMatrices sys;
    sys.kind = SystemKind::expected;
    sys.alpha = g.alpha_star;
    sys.u_bar = g.psi_s;
    sys.l_bar = -g.psi_r;
    sys.l_bar.diagonal() = g.psi_r.rowwise().sum();
    sys.m_bar = sys.l_bar;
    if (g.n_s > 0)
        sys.m_bar.diagonal() += g.psi_s.rowwise().sum();
    return sys;
}

DegreeSummary degree_summary(const RgsModel& model) {
    model.validate();
    DegreeSummary ds;
    ds.n_r = model.n_r;
    ds.n_s = model.n_s;
    ds.r0 = static_cast<double>(model.n_r) / static_cast<double>(model.n());

    const Eigen::VectorXd reg_deg = model.psi_r.matrix().rowwise().sum();
    const Eigen::VectorXd stub_deg = model.n_s > 0
                                         ? Eigen::VectorXd(model.psi_s.rowwise().sum())
                                         : Eigen::VectorXd::Zero(model.n_r);

    ds.delta_rr_max = reg_deg.maxCoeff();
    ds.delta_rs_max = stub_deg.maxCoeff();
    ds.delta_r_max = (reg_deg + stub_deg).maxCoeff();
    ds.delta_rs_min = stub_deg.minCoeff();
    ds.delta_sr_max = model.n_s > 0 ? model.psi_s.colwise().sum().maxCoeff() : 0.0;

    ds.n_r1 = 0;
    double min_pos = std::numeric_limits<double>::infinity();
    double max_rr_pos = 0.0;
    for (int i = 0; i < model.n_r; ++i) {
        if (stub_deg(i) > 0.0) {
            ++ds.n_r1;
            min_pos = std::min(min_pos, stub_deg(i));
            max_rr_pos = std::max(max_rr_pos, reg_deg(i));
        }
    }
    ds.n_r2 = model.n_r - ds.n_r1;
    ds.delta_rs_min_pos = ds.n_r1 > 0 ? min_pos : 0.0;
    ds.delta_rr_max_pos = max_rr_pos;
    ds.psi_s_norm = model.n_s > 0 ? spectral_norm(model.psi_s) : 0.0;
    return ds;
}

} // namespace gossip
