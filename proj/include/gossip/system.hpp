#pragma once

#include "gossip/graph.hpp"

namespace gossip {

enum class SystemKind { sampled, expected };

/// Dense matrices driving the mean dynamics, for either a realized graph or
/// the expected graph:
///   m_bar: total-degree diagonal minus regular-regular adjacency (n_r x n_r)
///   u_bar: regular x stubborn adjacency block
///   l_bar: Laplacian of the regular-only subgraph
///   alpha: (expected) number of edges
/// Identities: m_bar = l_bar + diag(u_bar * 1), row_sum(m_bar) = row_sum(u_bar).
struct SystemMatrices {
    Eigen::MatrixXd m_bar;
    Eigen::MatrixXd u_bar;
    Eigen::MatrixXd l_bar;
    double alpha = 0.0;
    SystemKind kind = SystemKind::sampled;

    int n_r() const { return static_cast<int>(m_bar.rows()); }
    int n_s() const { return static_cast<int>(u_bar.cols()); }
};

SystemMatrices assemble_system(const SampledGraph& g);
SystemMatrices assemble_system(const ExpectedGraph& g);

/// Expected-degree scalars of a model. All expectations are over the random
/// graph; norms and minima follow the usual conventions:
///   delta_r_max   max expected total degree of regular agents
///   delta_rr_max  max expected regular degree of regular agents
///   delta_rs_max  max expected stubborn degree of regular agents
///   delta_sr_max  max expected regular degree of stubborn agents
///   delta_rs_min  min expected stubborn degree of regular agents
///   delta_rs_min_pos  same minimum restricted to agents with positive value
///   delta_rr_max_pos  max expected regular degree over those same agents
///   psi_s_norm    spectral norm of psi_s
///   n_r1 / n_r2   counts of regular agents with positive / zero expected
///                 stubborn degree
struct DegreeSummary {
    int n_r = 0;
    int n_s = 0;
    double delta_r_max = 0.0;
    double delta_rr_max = 0.0;
    double delta_rs_max = 0.0;
    double delta_sr_max = 0.0;
    double delta_rs_min = 0.0;
    double delta_rs_min_pos = 0.0;
    double delta_rr_max_pos = 0.0;
    double r0 = 0.0;
    double psi_s_norm = 0.0;
    int n_r1 = 0;
    int n_r2 = 0;

    int n() const { return n_r + n_s; }
};

DegreeSummary degree_summary(const RgsModel& model);

} // namespace gossip
