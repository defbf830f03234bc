#pragma once

#include "gossip/bounds.hpp"
#include "gossip/engine.hpp"
#include "gossip/model.hpp"
#include "gossip/regimes.hpp"
#include "gossip/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gossip {

inline constexpr const char* kVersion = "gossip-conc 0.1.0";

/// Uniform-link benchmark model: n agents, a fraction c_s of them stubborn,
/// every admissible pair linked with probability psi (default (log n)^2 / n).
RgsModel uniform_link_model(int n, double c_s, double psi = -1.0);

/// Five-community block model: three regular communities of size n_r1 and two
/// stubborn communities of size n_s1. Within-community link probability
/// (log n)^beta1 / n, cross-community (log n)^beta2 / n; regular community k
/// reaches stubborn community k' with probability (log n)^gamma / n following
/// the attachment pattern (community 1 -> stubborn 1, community 3 -> stubborn
/// 2, community 2 -> per the c21/c22 switches).
RgsModel five_block_model(int n_r1, int n_s1, double beta1, double beta2, double gamma,
                          bool c21, bool c22);

/// Community label (0..4) per agent of five_block_model.
std::vector<int> five_block_labels(int n_r1, int n_s1);

/// Stubborn opinions for the five-block model: first community uniform on
/// (0.9, 1), second uniform on (0, 0.1).
Eigen::VectorXd draw_block_stubborn_opinions(int n_s1, std::uint64_t seed);

Eigen::VectorXd draw_uniform_vector(int n, double lo, double hi, std::uint64_t seed);

struct ExperimentConfig {
    std::string experiment;            // scaling | sbm_profile | time_average | mc_concentration
    std::uint64_t base_seed = 1;
    int trials = 1;
    int threads = 1;                   // execution detail; not part of the manifest
    std::string output_dir = "out";
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json model_spec;         // inline model JSON or {"file": path}

    static ExperimentConfig from_json(const nlohmann::json& doc);
    static ExperimentConfig from_file(const std::string& path);
    nlohmann::json manifest_fields() const; // canonical echo entering the hash
};

struct ExperimentResult {
    nlohmann::json manifest;
    std::string manifest_hash;
    std::vector<std::pair<std::string, std::string>> tables; // name -> csv payload
    nlohmann::json summary;
    int exit_code = 0;

    /// Writes manifest.json, summary.json and every table (each prefixed with
    /// a "# manifest-hash=..." line) into dir, creating it if needed.
    void write(const std::string& dir) const;
};

ExperimentResult run_scaling(const ExperimentConfig& config);
ExperimentResult run_sbm_profile(const ExperimentConfig& config);
ExperimentResult run_time_average(const ExperimentConfig& config);
ExperimentResult run_mc_concentration(const ExperimentConfig& config);

/// Dispatch by config.experiment.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Shortest round-trip decimal formatting; keeps result tables byte-stable.
std::string fmt(double v);

/// FNV-1a 64-bit over a string, hex-encoded.
std::string fnv1a_hex(const std::string& text);

/// Derived per-trial seed streams.
std::uint64_t trial_seed(std::uint64_t base, int grid_index, int trial);
std::uint64_t graph_seed(std::uint64_t trial);
std::uint64_t opinion_seed(std::uint64_t trial);
std::uint64_t stubborn_seed(std::uint64_t trial);

} // namespace gossip
