#include "gossip/graph.hpp"
#include "gossip/errors.hpp"
#include "gossip/rng.hpp"

#include <fstream>
#include <sstream>

namespace gossip {

namespace {
constexpr int kDenseLimit = 20000;
}

int SampledGraph::regular_degree(int i) const {
    int d = 0;
    for (auto v : neighbors[i])
        if (v < n_r) ++d;
    return d;
}

int SampledGraph::stubborn_degree(int i) const {
    int d = 0;
    for (auto v : neighbors[i])
        if (v >= n_r) ++d;
    return d;
}

Eigen::MatrixXd SampledGraph::dense_adjacency() const {
    if (n() > kDenseLimit)
        throw DomainError("dense adjacency refused for n > 20000");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n(), n());
    for (const auto& [i, j] : edges) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
    }
    return a;
}

double ExpectedGraph::weight(int i, int j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    if (j < n_r) return psi_r(i, j);
    if (i < n_r) return psi_s(i, j - n_r);
    return 0.0; // stubborn pair
}

Eigen::MatrixXd ExpectedGraph::dense_adjacency() const {
    if (n() > kDenseLimit)
        throw DomainError("dense adjacency refused for n > 20000");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n(), n());
    a.topLeftCorner(n_r, n_r) = psi_r;
    a.topRightCorner(n_r, n_s) = psi_s;
    a.bottomLeftCorner(n_s, n_r) = psi_s.transpose();
    return a;
}

SampledGraph sample_graph(const RgsModel& model, std::uint64_t seed) {
    model.validate();
    SampledGraph g;
    g.n_r = model.n_r;
    g.n_s = model.n_s;
    g.seed = seed;
    g.neighbors.resize(model.n());

    for (std::int32_t i = 0; i < model.n_r; ++i) {
        for (std::int32_t j = i + 1; j < model.n_r; ++j) {
            const double p = model.psi_r(i, j);
            if (p > 0.0 && edge_u01(seed, i, j) < p)
                g.edges.emplace_back(i, j);
        }
        for (std::int32_t j = 0; j < model.n_s; ++j) {
            const double p = model.psi_s(i, j);
            const std::int32_t gj = model.n_r + j;
            if (p > 0.0 && edge_u01(seed, i, gj) < p)
                g.edges.emplace_back(i, gj);
        }
    }
    for (const auto& [i, j] : g.edges) {
        g.neighbors[i].push_back(j);
        g.neighbors[j].push_back(i);
    }
    return g;
}

ExpectedGraph expected_graph(const RgsModel& model) {
    model.validate();
    ExpectedGraph g;
    g.n_r = model.n_r;
    g.n_s = model.n_s;
    g.psi_r = model.psi_r.matrix();
    g.psi_s = model.psi_s;
    long double alpha = 0.0L;
    for (int i = 0; i < g.n_r; ++i)
        for (int j = i + 1; j < g.n_r; ++j)
            alpha += g.psi_r(i, j);
    for (int i = 0; i < g.n_r; ++i)
        for (int j = 0; j < g.n_s; ++j)
            alpha += g.psi_s(i, j);
    g.alpha_star = static_cast<double>(alpha);
    return g;
}

bool ComponentReport::all_touch_stubborn() const {
    for (bool b : touches_stubborn)
        if (!b) return false;
    return true;
}

int ComponentReport::first_detached() const {
    for (std::size_t c = 0; c < touches_stubborn.size(); ++c)
        if (!touches_stubborn[c]) return static_cast<int>(c);
    return -1;
}

namespace {

/// Union-find over regular agents; adjacency supplied as a callback.
template <typename ForEachRegularEdge, typename StubbornWeight>
ComponentReport reachability_impl(int n_r, ForEachRegularEdge&& for_each_edge,
                                  StubbornWeight&& stubborn_weight) {
    std::vector<int> parent(n_r);
    for (int i = 0; i < n_r; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for_each_edge([&](int i, int j) {
        const int a = find(i), b = find(j);
        if (a != b) parent[a] = b;
    });

    ComponentReport rep;
    rep.component_of.assign(n_r, -1);
    for (int i = 0; i < n_r; ++i) {
        const int root = find(i);
        if (rep.component_of[root] < 0) {
            rep.component_of[root] = static_cast<int>(rep.component_sizes.size());
            rep.component_sizes.push_back(0);
            rep.touches_stubborn.push_back(false);
        }
        rep.component_of[i] = rep.component_of[root];
        rep.component_sizes[rep.component_of[i]] += 1;
        if (stubborn_weight(i) > 0.0)
            rep.touches_stubborn[rep.component_of[i]] = true;
    }
    return rep;
}

} // namespace

ComponentReport stubborn_reachability(const SampledGraph& g) {
    return reachability_impl(
        g.n_r,
        [&](auto&& unite) {
            for (const auto& [i, j] : g.edges)
                if (j < g.n_r) unite(i, j);
        },
        [&](int i) { return static_cast<double>(g.stubborn_degree(i)); });
}

ComponentReport stubborn_reachability(const ExpectedGraph& g) {
    return reachability_impl(
        g.n_r,
        [&](auto&& unite) {
            for (int i = 0; i < g.n_r; ++i)
                for (int j = i + 1; j < g.n_r; ++j)
                    if (g.psi_r(i, j) > 0.0) unite(i, j);
        },
        [&](int i) { return g.psi_s.cols() > 0 ? g.psi_s.row(i).sum() : 0.0; });
}

std::string edge_list_text(const SampledGraph& g) {
    std::ostringstream out;
    out << "# n_r=" << g.n_r << " n_s=" << g.n_s << " seed=" << g.seed << "\n";
    for (const auto& [i, j] : g.edges)
        out << (i + 1) << " " << (j + 1) << "\n";
    return out.str();
}

void export_edge_list(const SampledGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write edge list: " + path);
    out << edge_list_text(g);
}

} // namespace gossip
