#pragma once

#include "imc/plant.hpp"

#include <Eigen/Dense>

#include <vector>

namespace imc {

/// Gaussian radial-basis lattice on a uniform per-dimension grid over
/// [lo, hi]^dim with width equal to the lattice spacing. Basis outputs lie
/// in (0, 1]. Evaluation exploits separability: per-dimension factors are
/// computed once and combined by tensor product, index of dimension 0
/// varying fastest.
class RbfLattice {
public:
    RbfLattice(int dim, int per_dim, double lo, double hi);

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int size() const { return size_; }
    [[nodiscard]] double width() const { return width_; }

    [[nodiscard]] Eigen::VectorXd basis(const Eigen::VectorXd& in) const;

private:
    int dim_;
    int per_dim_;
    int size_;
    double width_;
    Eigen::VectorXd centers_; // shared across dimensions
};

struct ControllerParams {
    double kappa = 15.0; // tracking gain K_{i,q}
    double rho = 1.0;    // Young's-inequality constant rho_{i,q}
    double sigma = 0.5;  // sigma-modification leak
    double gamma = 10.0; // adaptation rate
    int rbf_per_dim = 5;
    double rbf_lo = -3.0;
    double rbf_hi = 3.0;

    /// Checks the stability margins: Delta_1 = kappa - rho^2 > 0 and
    /// Delta_q - 1/(2 rho^2) > 0 for q >= 2, with Delta_n = kappa - rho^2/2.
    void validate(int order) const;

    /// Diagnostics from the closed-loop analysis.
    [[nodiscard]] double l_a(int order) const;    // sum_q 1/(2 rho^2)
    [[nodiscard]] double c_gamma(int order) const;
};

/// Feedback law shared by the virtual inputs and the actual input:
/// -(kappa + rho^2/2 * ||g||^2) e - theta_phi.
double feedback_law(double e, double g_norm_sq, double theta_dot_phi, double kappa, double rho);

/// Backstepping error coordinates: e_1 = x_1 - eta_1, e_q = x_q - alpha_{q-1}.
/// `alphas` must carry the virtual inputs computed this step (size order-1).
Eigen::VectorXd tracking_errors(const Eigen::VectorXd& x, const Eigen::VectorXd& eta,
                                const Eigen::VectorXd& alphas);

/// One adaptation step of theta' = gamma (e phi - sigma theta) with e and phi
/// held: the exact exponential update toward the fixed point (e/sigma) phi.
Eigen::VectorXd adapt_step(const Eigen::VectorXd& theta, double e, const Eigen::VectorXd& phi,
                           double gamma, double sigma, double dt);

/// Adaptive backstepping controller of one agent. Owns the per-stage RBF
/// approximators and weight estimates; couples to other agents only through
/// the virtual trajectory passed into compute().
class AgentController {
public:
    AgentController(int order, const ControllerParams& params);

    struct Action {
        Eigen::VectorXd e;               // error coordinates, size n
        Eigen::VectorXd alpha;           // virtual inputs, size n-1
        double u = 0.0;                  // actual input
        std::vector<Eigen::VectorXd> phi; // basis activations per stage
    };

    /// Evaluates errors, virtual inputs and the actual input at the current
    /// plant/virtual states. Does not mutate the weights.
    [[nodiscard]] Action compute(const Eigen::VectorXd& x, const Eigen::VectorXd& eta,
                                 const AgentModel& model) const;

    /// Applies the adaptation law on the held activations of an Action.
    void adapt(const Action& action, double dt);

    [[nodiscard]] const Eigen::VectorXd& weights(int q_1based) const;
    [[nodiscard]] double weight_norm(int q_1based) const;
    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] const ControllerParams& params() const { return params_; }

private:
    [[nodiscard]] Eigen::VectorXd stage_input(int q_1based, const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& eta, double e_prev) const;

    int order_;
    ControllerParams params_;
    std::vector<RbfLattice> lattices_;
    std::vector<Eigen::VectorXd> weights_;
};

} // namespace imc
