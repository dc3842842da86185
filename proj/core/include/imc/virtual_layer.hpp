#pragma once

#include "imc/design.hpp"
#include "imc/graph.hpp"
#include "imc/schedule.hpp"

#include <Eigen/Dense>

namespace imc {

/// Per-agent auxiliary linear systems eta_i' = A eta_i + B K zeta_i, driven
/// by the intermittent distributed signal zeta. States are kept as the
/// columns of an order x N matrix. Owned by one run; stepped sequentially.
class VirtualLayer {
public:
    VirtualLayer(ChainSpec chain, Graph graph, Eigen::RowVectorXd gain, Eigen::MatrixXd eta0);

    [[nodiscard]] const Eigen::MatrixXd& etas() const { return etas_; }
    [[nodiscard]] int n_agents() const { return graph_.n(); }
    [[nodiscard]] int order() const { return chain_.order; }

    /// Distributed virtual signal for every agent (columns). ON:
    /// sum_j a_ij (eta_j - eta_i) + b_i (zbar - eta_i); OFF: zero.
    [[nodiscard]] Eigen::MatrixXd zetas(const Eigen::VectorXd& zbar, Mode mode) const;

    /// Single-agent variant (0-based index).
    [[nodiscard]] Eigen::VectorXd zeta(int agent, const Eigen::VectorXd& zbar, Mode mode) const;

    /// One RK4 step with zeta held constant. substeps > 1 subdivides the
    /// integration step while keeping the held input fixed.
    void step(const Eigen::MatrixXd& zetas, double dt, int substeps = 1);

    /// V_e = sum_i (eta_i - zbar)^T P (eta_i - zbar).
    [[nodiscard]] double lyapunov_Ve(const Eigen::VectorXd& zbar, const Eigen::MatrixXd& P) const;

private:
    ChainSpec chain_;
    Graph graph_;
    Eigen::RowVectorXd gain_;
    Eigen::MatrixXd a_;
    Eigen::VectorXd b_;
    Eigen::MatrixXd etas_; // order x N
};

/// Free-standing evaluation of V_e for logged states.
double lyapunov_Ve(const Eigen::MatrixXd& etas, const Eigen::VectorXd& zbar,
                   const Eigen::MatrixXd& P);

} // namespace imc
