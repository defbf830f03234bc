#pragma once

#include "gossip/model.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gossip {

/// Agents are globally indexed: regular [0, n_r), stubborn [n_r, n).
using Edge = std::pair<std::int32_t, std::int32_t>; // i < j

/// One realized graph drawn from an RgsModel. Stored as a sorted edge list
/// plus per-agent neighbor lists; dense matrices are assembled on demand.
struct SampledGraph {
    int n_r = 0;
    int n_s = 0;
    std::uint64_t seed = 0;
    std::vector<Edge> edges;                       // sorted, i < j
    std::vector<std::vector<std::int32_t>> neighbors;

    int n() const { return n_r + n_s; }
    std::int64_t edge_count() const { return static_cast<std::int64_t>(edges.size()); }

    /// Degree of agent i restricted to regular / stubborn neighbors.
    int regular_degree(int i) const;
    int stubborn_degree(int i) const;

    /// Dense 0/1 adjacency; refuses n > 20000.
    Eigen::MatrixXd dense_adjacency() const;
};

/// The weighted graph obtained by averaging the model: expected adjacency
/// [psi_r, psi_s; psi_s^T, 0] with total weight alpha_star.
struct ExpectedGraph {
    int n_r = 0;
    int n_s = 0;
    Eigen::MatrixXd psi_r;   // n_r x n_r
    Eigen::MatrixXd psi_s;   // n_r x n_s
    double alpha_star = 0.0;

    int n() const { return n_r + n_s; }
    double weight(int i, int j) const;

    /// Dense expected adjacency; refuses n > 20000.
    Eigen::MatrixXd dense_adjacency() const;
};

/// Draws each admissible edge independently with its link probability.
/// Deterministic in (model, seed); edge slots use independent keyed streams,
/// so the result does not depend on traversal order.
SampledGraph sample_graph(const RgsModel& model, std::uint64_t seed);

ExpectedGraph expected_graph(const RgsModel& model);

/// Connected-component diagnostic: for each component of the graph restricted
/// to regular agents (sampled edges, or positive expected weight), whether it
/// touches at least one stubborn agent. The solve for expected final opinions
/// is well-posed exactly when every component does.
struct ComponentReport {
    std::vector<int> component_of;        // per regular agent
    std::vector<int> component_sizes;
    std::vector<bool> touches_stubborn;   // per component
    bool all_touch_stubborn() const;
    /// Index of some component without stubborn attachment, or -1.
    int first_detached() const;
};

ComponentReport stubborn_reachability(const SampledGraph& g);
ComponentReport stubborn_reachability(const ExpectedGraph& g);

/// Edge-list text: header "# n_r=<..> n_s=<..> seed=<..>", then "i j" lines,
/// 1-indexed, sorted.
std::string edge_list_text(const SampledGraph& g);
void export_edge_list(const SampledGraph& g, const std::string& path);

} // namespace gossip
