#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gossip {

/// Symmetric matrix of pairwise link probabilities with zero diagonal.
/// Entries live in [0,1]; validated on construction.
class LinkProbabilityMatrix {
public:
    LinkProbabilityMatrix() = default;
    explicit LinkProbabilityMatrix(Eigen::MatrixXd entries);

    Eigen::Index size() const { return entries_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
    const Eigen::MatrixXd& matrix() const { return entries_; }

private:
    Eigen::MatrixXd entries_;
};

/// Independent-edge random graph model with regular and stubborn agents.
/// Regular agents occupy ids [0, n_r); stubborn agents [n_r, n_r + n_s).
/// Edges exist only regular-regular (psi_r) and regular-stubborn (psi_s);
/// stubborn pairs are never linked.
struct RgsModel {
    int n_r = 0;
    int n_s = 0;
    LinkProbabilityMatrix psi_r;     // n_r x n_r
    Eigen::MatrixXd psi_s;           // n_r x n_s, entries in [0,1]
    std::string description;

    int n() const { return n_r + n_s; }

    /// Validates counts and probability ranges; throws ModelError.
    void validate() const;
};

/// All off-diagonal entries equal to p.
LinkProbabilityMatrix build_er_psi(int n, double p);

/// psi_ij = w_i * w_j / sum(w). Requires max_i w_i^2 < sum(w) (strict),
/// otherwise throws ModelError naming the offending index.
LinkProbabilityMatrix build_chung_lu_psi(const std::vector<double>& w);

/// Block model over K communities. community_sizes[k] agents share community k;
/// link probability between communities k and l is pi(k, l). Communities
/// flagged stubborn are placed after the regular ones (order otherwise
/// preserved), and any stubborn-stubborn entries of pi are ignored.
RgsModel build_sbm_model(const std::vector<int>& community_sizes,
                         const Eigen::MatrixXd& pi,
                         const std::vector<bool>& stubborn_flags);

/// Community label per agent for a model built by build_sbm_model, regular
/// communities first. Helpers for experiment bookkeeping.
std::vector<int> sbm_community_labels(const std::vector<int>& community_sizes,
                                      const std::vector<bool>& stubborn_flags);

/// JSON model files. Two accepted shapes:
///   full:      {"n_r", "n_s", "psi_r" (dense rows or {"sizes","pi"}), "psi_s", "description"?}
///   shorthand: {"sizes", "pi", "stubborn_flags", "description"?}
RgsModel load_model(const std::string& path);
RgsModel parse_model_json(const std::string& text);
void save_model(const RgsModel& model, const std::string& path);

} // namespace gossip
