#pragma once

#include <Eigen/Dense>

#include <tuple>
#include <vector>

namespace imc {

/// Undirected follower communication graph with leader-pinning weights.
/// Validated once at construction; all operations assume a valid graph.
/// Immutable afterwards, safe to share across threads.
class Graph {
public:
    /// adjacency: N x N symmetric, zero diagonal, entries >= 0.
    /// pinning:   length N, entries >= 0, at least one > 0.
    Graph(Eigen::MatrixXd adjacency, Eigen::VectorXd pinning);

    /// Builds from a weighted edge list with 1-based agent indices, the form
    /// used in experiment config files.
    static Graph from_edges(int n_followers,
                            const std::vector<std::tuple<int, int, double>>& edges,
                            Eigen::VectorXd pinning);

    [[nodiscard]] int n() const { return static_cast<int>(pinning_.size()); }
    [[nodiscard]] const Eigen::MatrixXd& adjacency() const { return adjacency_; }
    [[nodiscard]] const Eigen::VectorXd& pinning() const { return pinning_; }

    /// L = D - A with D = diag(row sums). Symmetric, rows sum to zero.
    [[nodiscard]] Eigen::MatrixXd laplacian() const;

    /// L + diag(b): the matrix whose smallest eigenvalue gates the
    /// pinning-gain condition.
    [[nodiscard]] Eigen::MatrixXd pinned_laplacian() const;

    /// Smallest eigenvalue of L + diag(b). Throws "not leader-connected"
    /// if the result is not strictly positive.
    [[nodiscard]] double min_eig_pinned_laplacian() const;

private:
    Eigen::MatrixXd adjacency_;
    Eigen::VectorXd pinning_;
};

} // namespace imc
