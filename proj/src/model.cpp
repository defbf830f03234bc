#include "gossip/model.hpp"
#include "gossip/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace gossip {

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

} // namespace

LinkProbabilityMatrix::LinkProbabilityMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    const Eigen::Index n = entries_.rows();
    if (n != entries_.cols())
        throw ModelError("link probability matrix must be square");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (entries_(i, i) != 0.0)
            throw ModelError("link probability matrix must have zero diagonal (agent " +
                             std::to_string(i + 1) + ")");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (entries_(i, j) != entries_(j, i))
                throw ModelError("link probability matrix must be symmetric");
            if (!is_probability(entries_(i, j)))
                throw ModelError("link probability out of [0,1] at (" + std::to_string(i + 1) +
                                 "," + std::to_string(j + 1) + ")");
        }
    }
}

void RgsModel::validate() const {
    if (n_r < 1)
        throw ModelError("model needs at least one regular agent");
    if (n_s < 0)
        throw ModelError("stubborn agent count must be nonnegative");
    if (psi_r.size() != n_r)
        throw ModelError("psi_r dimension does not match n_r");
    if (psi_s.rows() != n_r || psi_s.cols() != n_s)
        throw ModelError("psi_s must be n_r x n_s");
    for (Eigen::Index i = 0; i < psi_s.rows(); ++i)
        for (Eigen::Index j = 0; j < psi_s.cols(); ++j)
            if (!is_probability(psi_s(i, j)))
                throw ModelError("stubborn link probability out of [0,1] at (" +
                                 std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
}

LinkProbabilityMatrix build_er_psi(int n, double p) {
    if (n < 1)
        throw ModelError("agent count must be positive");
    if (!is_probability(p))
        throw ModelError("edge probability must lie in [0,1]");
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, p);
    m.diagonal().setZero();
    return LinkProbabilityMatrix(std::move(m));
}

LinkProbabilityMatrix build_chung_lu_psi(const std::vector<double>& w) {
    const int n = static_cast<int>(w.size());
    if (n < 1)
        throw ModelError("weight sequence must be nonempty");
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(std::isfinite(w[i]) && w[i] >= 0.0))
            throw ModelError("weight " + std::to_string(i + 1) + " must be nonnegative");
        total += w[i];
    }
    for (int i = 0; i < n; ++i) {
        if (!(w[i] * w[i] < total))
            throw ModelError("expected-degree condition violated at index " + std::to_string(i + 1) +
                             ": w_i^2 = " + std::to_string(w[i] * w[i]) +
                             " must be < sum(w) = " + std::to_string(total));
    }
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = (i == j) ? 0.0 : w[i] * w[j] / total;
    return LinkProbabilityMatrix(std::move(m));
}

namespace {

struct SbmLayout {
    std::vector<int> order;       // community indices, regular first
    std::vector<int> offsets;     // agent offset per ordered community
    int n_r = 0;
    int n_s = 0;
};

SbmLayout sbm_layout(const std::vector<int>& sizes, const std::vector<bool>& flags) {
    if (sizes.size() != flags.size())
        throw ModelError("community sizes and stubborn flags must have equal length");
    if (sizes.empty())
        throw ModelError("at least one community required");
    SbmLayout out;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] < 1)
            throw ModelError("community " + std::to_string(k + 1) + " must be nonempty");
        if (!flags[k]) out.order.push_back(static_cast<int>(k));
    }
    for (std::size_t k = 0; k < sizes.size(); ++k)
        if (flags[k]) out.order.push_back(static_cast<int>(k));
    out.offsets.resize(sizes.size());
    int pos = 0;
    for (int k : out.order) {
        out.offsets[k] = pos;
        pos += sizes[k];
        if (flags[k]) out.n_s += sizes[k];
        else out.n_r += sizes[k];
    }
    return out;
}

} // namespace

RgsModel build_sbm_model(const std::vector<int>& community_sizes,
                         const Eigen::MatrixXd& pi,
                         const std::vector<bool>& stubborn_flags) {
    const int K = static_cast<int>(community_sizes.size());
    if (pi.rows() != K || pi.cols() != K)
        throw ModelError("pi must be " + std::to_string(K) + "x" + std::to_string(K) +
                         " to match the community count");
    for (int a = 0; a < K; ++a)
        for (int b = 0; b < K; ++b) {
            if (pi(a, b) != pi(b, a))
                throw ModelError("pi must be symmetric");
            if (!is_probability(pi(a, b)))
                throw ModelError("pi entries must lie in [0,1]");
        }

    const SbmLayout layout = sbm_layout(community_sizes, stubborn_flags);
    if (layout.n_r < 1)
        throw ModelError("at least one regular community required");

    const auto labels = sbm_community_labels(community_sizes, stubborn_flags);
    RgsModel model;
    model.n_r = layout.n_r;
    model.n_s = layout.n_s;

    Eigen::MatrixXd psi_r = Eigen::MatrixXd::Zero(layout.n_r, layout.n_r);
    for (int i = 0; i < layout.n_r; ++i)
        for (int j = i + 1; j < layout.n_r; ++j) {
            const double p = pi(labels[i], labels[j]);
            psi_r(i, j) = p;
            psi_r(j, i) = p;
        }
    model.psi_r = LinkProbabilityMatrix(std::move(psi_r));

    model.psi_s = Eigen::MatrixXd::Zero(layout.n_r, layout.n_s);
    for (int i = 0; i < layout.n_r; ++i)
        for (int j = 0; j < layout.n_s; ++j)
            model.psi_s(i, j) = pi(labels[i], labels[layout.n_r + j]);

    model.validate();
    return model;
}

std::vector<int> sbm_community_labels(const std::vector<int>& community_sizes,
                                      const std::vector<bool>& stubborn_flags) {
    const SbmLayout layout = sbm_layout(community_sizes, stubborn_flags);
    std::vector<int> labels(layout.n_r + layout.n_s);
    for (int k : layout.order)
        for (int a = 0; a < community_sizes[k]; ++a)
            labels[layout.offsets[k] + a] = k;
    return labels;
}

namespace {

using nlohmann::json;

Eigen::MatrixXd dense_from_json(const json& rows, const char* field) {
    if (!rows.is_array() || rows.empty())
        throw ModelError(std::string(field) + " must be a nonempty array of rows");
    const std::size_t ncols = rows.front().size();
    Eigen::MatrixXd m(rows.size(), ncols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || rows[i].size() != ncols)
            throw ModelError(std::string(field) + " rows must have equal length");
        for (std::size_t j = 0; j < ncols; ++j)
            m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

json dense_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

RgsModel parse_model_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        throw ModelError(std::string("model file is not valid JSON: ") + e.what());
    }

    if (doc.contains("sizes")) {
        std::vector<int> sizes = doc.at("sizes").get<std::vector<int>>();
        std::vector<bool> flags = doc.at("stubborn_flags").get<std::vector<bool>>();
        Eigen::MatrixXd pi = dense_from_json(doc.at("pi"), "pi");
        RgsModel model = build_sbm_model(sizes, pi, flags);
        if (doc.contains("description")) model.description = doc["description"].get<std::string>();
        return model;
    }

    RgsModel model;
    model.n_r = doc.at("n_r").get<int>();
    model.n_s = doc.at("n_s").get<int>();
    const json& pr = doc.at("psi_r");
    if (pr.is_object()) {
        // Block spec: community sizes plus a link matrix, all regular.
        std::vector<int> sizes = pr.at("sizes").get<std::vector<int>>();
        Eigen::MatrixXd pi = dense_from_json(pr.at("pi"), "psi_r.pi");
        std::vector<bool> flags(sizes.size(), false);
        RgsModel blocks = build_sbm_model(sizes, pi, flags);
        if (blocks.n_r != model.n_r)
            throw ModelError("psi_r block spec does not add up to n_r");
        model.psi_r = blocks.psi_r;
    } else {
        model.psi_r = LinkProbabilityMatrix(dense_from_json(pr, "psi_r"));
    }
    if (model.n_s > 0 || doc.contains("psi_s")) {
        Eigen::MatrixXd psi_s = model.n_s > 0 ? dense_from_json(doc.at("psi_s"), "psi_s")
                                              : Eigen::MatrixXd(model.n_r, 0);
        model.psi_s = std::move(psi_s);
    } else {
        model.psi_s = Eigen::MatrixXd(model.n_r, 0);
    }
    if (doc.contains("description")) model.description = doc["description"].get<std::string>();
    model.validate();
    return model;
}

RgsModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ModelError("cannot open model file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model_json(buf.str());
}

void save_model(const RgsModel& model, const std::string& path) {
    model.validate();
    nlohmann::json doc;
    doc["n_r"] = model.n_r;
    doc["n_s"] = model.n_s;
    doc["psi_r"] = dense_to_json(model.psi_r.matrix());
    doc["psi_s"] = dense_to_json(model.psi_s);
    doc["description"] = model.description;
    std::ofstream out(path);
    if (!out)
        throw ModelError("cannot write model file: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace gossip
