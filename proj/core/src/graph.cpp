#include "imc/graph.hpp"

#include "imc/errors.hpp"
#include "imc/linalg.hpp"

#include <cmath>
#include <string>

namespace imc {

Graph::Graph(Eigen::MatrixXd adjacency, Eigen::VectorXd pinning)
    : adjacency_(std::move(adjacency)), pinning_(std::move(pinning)) {
    const auto n = adjacency_.rows();
    if (n == 0 || adjacency_.cols() != n)
        throw ValidationError("graph: adjacency must be square and non-empty");
    if (pinning_.size() != n)
        throw ValidationError("graph: pinning length must match adjacency size");
    if (!linalg::is_symmetric(adjacency_, 1e-12))
        throw ValidationError("graph: adjacency must be symmetric");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (adjacency_(i, i) != 0.0)
            throw ValidationError("graph: adjacency diagonal must be zero");
        if (pinning_[i] < 0.0)
            throw ValidationError("graph: pinning weights must be >= 0");
        for (Eigen::Index j = 0; j < n; ++j)
            if (adjacency_(i, j) < 0.0 || !std::isfinite(adjacency_(i, j)))
                throw ValidationError("graph: adjacency weights must be finite and >= 0");
    }
    if (pinning_.maxCoeff() <= 0.0)
        throw ValidationError("graph: at least one agent must be pinned to the leader");
}

Graph Graph::from_edges(int n_followers,
                        const std::vector<std::tuple<int, int, double>>& edges,
                        Eigen::VectorXd pinning) {
    if (n_followers <= 0) throw ValidationError("graph: n_followers must be positive");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_followers, n_followers);
    for (const auto& [i, j, w] : edges) {
        if (i < 1 || i > n_followers || j < 1 || j > n_followers || i == j)
            throw ValidationError("graph: edge (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") out of range or self-loop");
        a(i - 1, j - 1) = w;
        a(j - 1, i - 1) = w;
    }
    return Graph(std::move(a), std::move(pinning));
}

Eigen::MatrixXd Graph::laplacian() const {
    Eigen::MatrixXd l = -adjacency_;
    l.diagonal() = adjacency_.rowwise().sum();
    return l;
}

Eigen::MatrixXd Graph::pinned_laplacian() const {
    Eigen::MatrixXd m = laplacian();
    m.diagonal() += pinning_;
    return m;
}

double Graph::min_eig_pinned_laplacian() const {
    const double lam = linalg::min_eigenvalue(pinned_laplacian());
    if (lam <= 0.0)
        throw ValidationError("graph not leader-connected: min eig(L+B) = " +
                              std::to_string(lam));
    return lam;
}

} // namespace imc
