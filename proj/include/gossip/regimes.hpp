#pragma once

#include "gossip/system.hpp"

#include <map>
#include <optional>
#include <string>

namespace gossip {

enum class Regime { polarization_limit, consensus_limit, block_limit, indeterminate };

std::string regime_name(Regime r);

/// Advisory classification of the asymptotic profile at finite size. Each
/// scale-separation hypothesis becomes a ratio (its left side over its right
/// side); a branch is assigned only when all of its ratios exceed the
/// threshold, and raw ratios always ship with the verdict.
struct ProfileVerdict {
    Regime regime = Regime::indeterminate;
    std::map<std::string, double> ratios;
    double c_m = 0.5;
    double threshold = 10.0;
    std::optional<double> gamma_n;            // consensus value, when defined
    std::optional<Eigen::VectorXd> limit_vector;
    std::optional<double> residual;           // ||x - limit|| / ||z||

    std::string to_json(const std::string& limit_vector_path = "") const;
};

/// Entrywise stubborn-weighted average (diag(psi_s 1))^{-1} psi_s z.
/// Requires every row sum of psi_s positive; a zero row means the agent has
/// no stubborn attachment and block_limit applies instead.
Eigen::VectorXd large_influence_limit(const Eigen::MatrixXd& psi_s, const Eigen::VectorXd& z_s);

/// Limit for models where some regular agents have zero expected stubborn
/// degree: agents with positive stubborn rows get their stubborn-weighted
/// average; the rest get the corresponding block of the inverse system matrix
/// applied to the stubborn input (Schur-complement evaluation). Input must be
/// the expected-graph system.
Eigen::VectorXd block_limit(const SystemMatrices& sys_star, const Eigen::VectorXd& z_s);

/// Consensus value 1^T psi_s z / (n_r lambda1).
double consensus_value(const Eigen::MatrixXd& psi_s, const Eigen::VectorXd& z_s,
                       double lambda1_mstar, int n_r);

/// Optional spectra of the zero-stubborn block partition, used to sharpen the
/// block-branch ratios when available.
struct BlockSpectra {
    double lambda1_m22 = 0.0;
    double m21_norm = 0.0;
};

ProfileVerdict regime_diagnostics(const DegreeSummary& ds, double lambda1_mstar,
                                  double lambda2_lstar, double c_m = 0.5,
                                  double threshold = 10.0,
                                  std::optional<BlockSpectra> block = std::nullopt);

} // namespace gossip
