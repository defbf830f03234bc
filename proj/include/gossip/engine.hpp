#pragma once

#include "gossip/graph.hpp"
#include "gossip/system.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace gossip {

/// Inverse-CDF table over the unordered pairs that can interact, in
/// lexicographic (i < j) order. Weights are (expected) adjacency over alpha;
/// tables built from realized graphs use an O(1) equal-weight shortcut.
struct InteractionTable {
    int n_r = 0;
    int n_s = 0;
    SystemKind kind = SystemKind::sampled;
    std::vector<Edge> pairs;
    std::vector<double> cum;   // cum.back() == 1.0
    bool uniform = false;

    std::size_t draw(std::uint64_t bits) const;
};

InteractionTable make_interaction_table(const SampledGraph& g);
InteractionTable make_interaction_table(const ExpectedGraph& g);

/// State of one simulated opinion path. `x` holds X(t); the running sum of
/// X(0..t-1) is kept with compensated summation and accumulated lazily
/// (an agent's contribution is folded in when its opinion changes).
struct GossipTrajectory {
    Eigen::VectorXd x;
    Eigen::VectorXd z_s;
    std::uint64_t seed = 0;
    std::int64_t t = 0;
    double c_x = 0.0;

    // compensated lazy accumulator internals
    Eigen::VectorXd sum;
    Eigen::VectorXd comp;
    std::vector<std::int64_t> last_flush;

    /// Sum of X(0..t-1), including pending lazy contributions.
    Eigen::VectorXd running_sum() const;
};

GossipTrajectory init_trajectory(Eigen::VectorXd x0, Eigen::VectorXd z_s, std::uint64_t seed);

/// Advance one interaction; the step at index t draws from a counter-based
/// stream keyed by (seed, t), so trajectories are resumable and deterministic.
void step(GossipTrajectory& traj, const InteractionTable& table);

/// Advance t_max steps (tight loop; equivalent to t_max calls of step()).
void run(GossipTrajectory& traj, const InteractionTable& table, std::int64_t t_max);

/// S(t) = running_sum / t. Throws DomainError at t = 0.
Eigen::VectorXd time_average(const GossipTrajectory& traj);

/// CSV snapshot of current opinions: "t,agent_id,opinion".
std::string trajectory_csv(const GossipTrajectory& traj);
/// CSV of the time average: "agent_id,s_value".
std::string time_average_csv(const GossipTrajectory& traj);

/// Checkpoint record: {seed, t, x, running_sum, comp}. Together with the
/// counter-based step stream this resumes a run exactly.
std::string checkpoint_json(const GossipTrajectory& traj);
GossipTrajectory load_checkpoint_json(const std::string& text, Eigen::VectorXd z_s);

} // namespace gossip
