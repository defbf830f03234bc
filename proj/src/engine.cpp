#include "gossip/engine.hpp"
#include "gossip/errors.hpp"
#include "gossip/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gossip {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStepTag = 0x737465700A0A0A0AULL;

// Knuth two-sum: error-free transform, branch-free.
inline void eft_add(double& sum, double& comp, double v) {
    const double t = sum + v;
    const double vp = t - sum;
    comp += (sum - (t - vp)) + (v - vp);
    sum = t;
}

} // namespace

std::size_t InteractionTable::draw(std::uint64_t bits) const {
    if (uniform) {
        const auto m = static_cast<unsigned __int128>(pairs.size());
        return static_cast<std::size_t>((static_cast<unsigned __int128>(bits >> 11) * m) >> 53);
    }
    const double u = u01(bits);
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return static_cast<std::size_t>(std::distance(cum.begin(), it));
}

InteractionTable make_interaction_table(const SampledGraph& g) {
    if (g.edge_count() == 0)
        throw DomainError("interaction table undefined on an empty graph");
    InteractionTable table;
    table.n_r = g.n_r;
    table.n_s = g.n_s;
    table.kind = SystemKind::sampled;
    table.pairs = g.edges;
    table.uniform = true;
    const double m = static_cast<double>(table.pairs.size());
    table.cum.resize(table.pairs.size());
    for (std::size_t k = 0; k < table.pairs.size(); ++k)
        table.cum[k] = static_cast<double>(k + 1) / m;
    table.cum.back() = 1.0;
    return table;
}

InteractionTable make_interaction_table(const ExpectedGraph& g) {
    InteractionTable table;
    table.n_r = g.n_r;
    table.n_s = g.n_s;
    table.kind = SystemKind::expected;

    long double total = 0.0L;
    for (int i = 0; i < g.n_r; ++i) {
        for (int j = i + 1; j < g.n_r; ++j)
            if (g.psi_r(i, j) > 0.0) {
                table.pairs.emplace_back(i, j);
                total += g.psi_r(i, j);
            }
        for (int j = 0; j < g.n_s; ++j)
            if (g.psi_s(i, j) > 0.0) {
                table.pairs.emplace_back(i, g.n_r + j);
                total += g.psi_s(i, j);
            }
    }
    if (table.pairs.empty())
        throw DomainError("interaction table undefined on an empty expected graph");
    // pairs were pushed row-by-row; restore global lexicographic order
    std::sort(table.pairs.begin(), table.pairs.end());

    table.cum.resize(table.pairs.size());
    long double acc = 0.0L;
    for (std::size_t k = 0; k < table.pairs.size(); ++k) {
        const auto& [i, j] = table.pairs[k];
        acc += (j < g.n_r) ? g.psi_r(i, j) : g.psi_s(i, j - g.n_r);
        table.cum[k] = static_cast<double>(acc / total);
    }
    if (std::abs(table.cum.back() - 1.0) > 1e-12)
        throw DomainError("interaction weights do not normalize");
    table.cum.back() = 1.0;

    bool uniform = true;
    const double w0 = table.cum[0];
    for (std::size_t k = 1; k < table.pairs.size() && uniform; ++k)
        uniform = (table.cum[k] - table.cum[k - 1]) == w0;
    table.uniform = uniform;
    return table;
}

GossipTrajectory init_trajectory(Eigen::VectorXd x0, Eigen::VectorXd z_s, std::uint64_t seed) {
    if (x0.size() < 1)
        throw DomainError("initial opinion vector must be nonempty");
    GossipTrajectory traj;
    traj.x = std::move(x0);
    traj.z_s = std::move(z_s);
    traj.seed = seed;
    traj.t = 0;
    traj.c_x = traj.x.cwiseAbs().maxCoeff();
    if (traj.z_s.size() > 0)
        traj.c_x = std::max(traj.c_x, traj.z_s.cwiseAbs().maxCoeff());
    traj.sum = Eigen::VectorXd::Zero(traj.x.size());
    traj.comp = Eigen::VectorXd::Zero(traj.x.size());
    traj.last_flush.assign(static_cast<std::size_t>(traj.x.size()), 0);
    return traj;
}

namespace {

void check_dims(const GossipTrajectory& traj, const InteractionTable& table) {
    if (traj.x.size() != table.n_r)
        throw DomainError("trajectory has " + std::to_string(traj.x.size()) +
                          " regular agents but the interaction table expects " +
                          std::to_string(table.n_r));
    if (traj.z_s.size() != table.n_s)
        throw DomainError("stubborn vector has " + std::to_string(traj.z_s.size()) +
                          " entries but the interaction table expects " +
                          std::to_string(table.n_s));
}

inline void flush_agent(GossipTrajectory& traj, int i, std::int64_t upto) {
    const std::int64_t pending = upto - traj.last_flush[i];
    if (pending > 0)
        eft_add(traj.sum[i], traj.comp[i], traj.x[i] * static_cast<double>(pending));
    traj.last_flush[i] = upto;
}

void flush_all(GossipTrajectory& traj) {
    for (int i = 0; i < traj.x.size(); ++i)
        flush_agent(traj, i, traj.t);
}

} // namespace

void run(GossipTrajectory& traj, const InteractionTable& table, std::int64_t t_max) {
    if (t_max < 0)
        throw DomainError("t_max must be nonnegative");
    check_dims(traj, table);

    const std::uint64_t base = derive_seed(traj.seed, kStepTag);
    const Edge* pairs = table.pairs.data();
    double* x = traj.x.data();
    const double* z = traj.z_s.data();
    const int n_r = table.n_r;

    double* sum = traj.sum.data();
    double* comp = traj.comp.data();
    std::int64_t* last = traj.last_flush.data();

    std::uint64_t key = base + static_cast<std::uint64_t>(traj.t) * kGolden;
    const std::int64_t t_end = traj.t + t_max;
    for (std::int64_t t = traj.t; t < t_end; ++t) {
        const std::uint64_t h = mix64(key);
        key += kGolden;
        const auto [i, j] = pairs[table.draw(h)];
        // inside the loop the pending span is always >= 1
        eft_add(sum[i], comp[i], x[i] * static_cast<double>(t + 1 - last[i]));
        last[i] = t + 1;
        if (j < n_r) {
            eft_add(sum[j], comp[j], x[j] * static_cast<double>(t + 1 - last[j]));
            last[j] = t + 1;
            const double m = 0.5 * (x[i] + x[j]);
            x[i] = m;
            x[j] = m;
        } else {
            x[i] = 0.5 * (x[i] + z[j - n_r]);
        }
    }
    traj.t = t_end;
    flush_all(traj);
}

void step(GossipTrajectory& traj, const InteractionTable& table) { run(traj, table, 1); }

Eigen::VectorXd GossipTrajectory::running_sum() const {
    Eigen::VectorXd out(x.size());
    for (int i = 0; i < x.size(); ++i) {
        const std::int64_t pending = t - last_flush[i];
        out[i] = sum[i] + comp[i] + x[i] * static_cast<double>(pending);
    }
    return out;
}

Eigen::VectorXd time_average(const GossipTrajectory& traj) {
    if (traj.t < 1)
        throw DomainError("time average undefined before the first step");
    return traj.running_sum() / static_cast<double>(traj.t);
}

std::string trajectory_csv(const GossipTrajectory& traj) {
    std::ostringstream out;
    out << "t,agent_id,opinion\n";
    out.precision(17);
    for (int i = 0; i < traj.x.size(); ++i)
        out << traj.t << "," << (i + 1) << "," << traj.x[i] << "\n";
    return out.str();
}

std::string time_average_csv(const GossipTrajectory& traj) {
    const Eigen::VectorXd s = time_average(traj);
    std::ostringstream out;
    out << "agent_id,s_value\n";
    out.precision(17);
    for (int i = 0; i < s.size(); ++i)
        out << (i + 1) << "," << s[i] << "\n";
    return out.str();
}

std::string checkpoint_json(const GossipTrajectory& traj) {
    nlohmann::json doc;
    doc["seed"] = traj.seed;
    doc["t"] = traj.t;
    doc["c_x"] = traj.c_x;
    doc["x"] = std::vector<double>(traj.x.data(), traj.x.data() + traj.x.size());
    const Eigen::VectorXd rs = traj.running_sum();
    doc["running_sum"] = std::vector<double>(rs.data(), rs.data() + rs.size());
    // kept separately so a resumed accumulator matches the uninterrupted run
    Eigen::VectorXd flushed_sum = traj.sum;
    Eigen::VectorXd flushed_comp = traj.comp;
    for (int i = 0; i < traj.x.size(); ++i) {
        const std::int64_t pending = traj.t - traj.last_flush[i];
        if (pending > 0)
            eft_add(flushed_sum[i], flushed_comp[i], traj.x[i] * static_cast<double>(pending));
    }
    doc["sum"] = std::vector<double>(flushed_sum.data(), flushed_sum.data() + flushed_sum.size());
    doc["comp"] =
        std::vector<double>(flushed_comp.data(), flushed_comp.data() + flushed_comp.size());
    return doc.dump();
}

GossipTrajectory load_checkpoint_json(const std::string& text, Eigen::VectorXd z_s) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw DomainError(std::string("invalid checkpoint JSON: ") + e.what());
    }
    const auto xv = doc.at("x").get<std::vector<double>>();
    GossipTrajectory traj =
        init_trajectory(Eigen::Map<const Eigen::VectorXd>(xv.data(), xv.size()), std::move(z_s),
                        doc.at("seed").get<std::uint64_t>());
    traj.t = doc.at("t").get<std::int64_t>();
    if (doc.contains("c_x")) traj.c_x = doc.at("c_x").get<double>();
    const auto sv = doc.contains("sum") ? doc.at("sum").get<std::vector<double>>()
                                        : doc.at("running_sum").get<std::vector<double>>();
    traj.sum = Eigen::Map<const Eigen::VectorXd>(sv.data(), sv.size());
    if (doc.contains("comp")) {
        const auto cv = doc.at("comp").get<std::vector<double>>();
        traj.comp = Eigen::Map<const Eigen::VectorXd>(cv.data(), cv.size());
    }
    traj.last_flush.assign(static_cast<std::size_t>(traj.x.size()), traj.t);
    return traj;
}

} // namespace gossip
