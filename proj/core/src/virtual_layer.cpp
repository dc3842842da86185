#include "imc/virtual_layer.hpp"

#include "imc/errors.hpp"

#include <string>
#include <utility>

namespace imc {

VirtualLayer::VirtualLayer(ChainSpec chain, Graph graph, Eigen::RowVectorXd gain,
                           Eigen::MatrixXd eta0)
    : chain_(chain), graph_(std::move(graph)), gain_(std::move(gain)), a_(chain.A()),
      b_(chain.B()), etas_(std::move(eta0)) {
    if (gain_.size() != chain_.order)
        throw ValidationError("virtual layer: gain length must equal the chain order");
    if (etas_.rows() != chain_.order || etas_.cols() != graph_.n())
        throw ValidationError("virtual layer: eta0 must be order x n_agents");
}

Eigen::MatrixXd VirtualLayer::zetas(const Eigen::VectorXd& zbar, Mode mode) const {
    const int n_agents = graph_.n();
    if (mode == Mode::off) return Eigen::MatrixXd::Zero(chain_.order, n_agents);
    if (zbar.size() != chain_.order)
        throw ValidationError("virtual layer: zbar must have length = chain order");

    const Eigen::MatrixXd& adj = graph_.adjacency();
    const Eigen::VectorXd& pin = graph_.pinning();
    Eigen::MatrixXd z(chain_.order, n_agents);
    for (int i = 0; i < n_agents; ++i) {
        Eigen::VectorXd acc = pin[i] * (zbar - etas_.col(i));
        for (int j = 0; j < n_agents; ++j)
            if (adj(i, j) != 0.0) acc += adj(i, j) * (etas_.col(j) - etas_.col(i));
        z.col(i) = acc;
    }
    return z;
}

Eigen::VectorXd VirtualLayer::zeta(int agent, const Eigen::VectorXd& zbar, Mode mode) const {
    if (agent < 0 || agent >= graph_.n())
        throw ValidationError("virtual layer: agent index out of range");
    if (mode == Mode::off) return Eigen::VectorXd::Zero(chain_.order);
    return zetas(zbar, mode).col(agent);
}

void VirtualLayer::step(const Eigen::MatrixXd& zetas, double dt, int substeps) {
    if (dt <= 0.0 || substeps < 1) throw ValidationError("virtual layer: bad step size");
    const Eigen::MatrixXd input = b_ * (gain_ * zetas); // order x N, constant over the step
    const double h = dt / static_cast<double>(substeps);
    for (int s = 0; s < substeps; ++s) {
        const Eigen::MatrixXd k1 = a_ * etas_ + input;
        const Eigen::MatrixXd k2 = a_ * (etas_ + 0.5 * h * k1) + input;
        const Eigen::MatrixXd k3 = a_ * (etas_ + 0.5 * h * k2) + input;
        const Eigen::MatrixXd k4 = a_ * (etas_ + h * k3) + input;
        etas_ += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!etas_.allFinite())
        throw DivergenceError("virtual layer: non-finite state after step");
}

double VirtualLayer::lyapunov_Ve(const Eigen::VectorXd& zbar, const Eigen::MatrixXd& P) const {
    return imc::lyapunov_Ve(etas_, zbar, P);
}

double lyapunov_Ve(const Eigen::MatrixXd& etas, const Eigen::VectorXd& zbar,
                   const Eigen::MatrixXd& P) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < etas.cols(); ++i) {
        const Eigen::VectorXd s = etas.col(i) - zbar;
        v += s.dot(P * s);
    }
    return v;
}

} // namespace imc
