#include "imc/controller.hpp"

#include "imc/errors.hpp"

#include <cmath>
#include <string>

namespace imc {

RbfLattice::RbfLattice(int dim, int per_dim, double lo, double hi)
    : dim_(dim), per_dim_(per_dim) {
    if (dim < 1 || per_dim < 1) throw ValidationError("rbf: dim and per_dim must be >= 1");
    if (!(lo < hi)) throw ValidationError("rbf: need lo < hi");

    centers_.resize(per_dim);
    if (per_dim == 1) {
        centers_[0] = 0.5 * (lo + hi);
        width_ = 0.5 * (hi - lo);
    } else {
        const double spacing = (hi - lo) / static_cast<double>(per_dim - 1);
        for (int k = 0; k < per_dim; ++k) centers_[k] = lo + spacing * k;
        width_ = spacing;
    }

    double s = 1.0;
    for (int d = 0; d < dim; ++d) s *= per_dim;
    size_ = static_cast<int>(s);
}

Eigen::VectorXd RbfLattice::basis(const Eigen::VectorXd& in) const {
    if (in.size() != dim_) throw ValidationError("rbf: input size mismatch");

    const double inv2w2 = 1.0 / (2.0 * width_ * width_);
    Eigen::VectorXd acc(1);
    acc[0] = 1.0;
    Eigen::VectorXd factors(per_dim_);
    for (int d = 0; d < dim_; ++d) {
        for (int k = 0; k < per_dim_; ++k) {
            const double dx = in[d] - centers_[k];
            factors[k] = std::exp(-dx * dx * inv2w2);
        }
        Eigen::VectorXd next(acc.size() * per_dim_);
        for (int k = 0; k < per_dim_; ++k)
            next.segment(k * acc.size(), acc.size()) = factors[k] * acc;
        acc.swap(next);
    }
    return acc;
}

void ControllerParams::validate(int order) const {
    if (kappa <= 0.0 || rho <= 0.0 || sigma <= 0.0 || gamma <= 0.0)
        throw ValidationError("controller: kappa, rho, sigma, gamma must be > 0");
    if (order < 1) throw ValidationError("controller: order must be >= 1");

    const double rho2 = rho * rho;
    const double delta_mid = kappa - rho2;       // Delta_q, q < n
    const double delta_last = kappa - 0.5 * rho2; // Delta_n
    const double cross = 1.0 / (2.0 * rho2);

    if (order == 1) {
        if (delta_last <= 0.0)
            throw ValidationError("controller: kappa - rho^2/2 must be > 0");
        return;
    }
    if (delta_mid <= 0.0)
        throw ValidationError("controller: Delta_1 = kappa - rho^2 must be > 0");
    for (int q = 2; q <= order; ++q) {
        const double delta_q = (q < order) ? delta_mid : delta_last;
        if (delta_q - cross <= 0.0)
            throw ValidationError("controller: Delta_" + std::to_string(q) +
                                  " - 1/(2 rho^2) must be > 0");
    }
}

double ControllerParams::l_a(int order) const {
    return static_cast<double>(order) / (2.0 * rho * rho);
}

double ControllerParams::c_gamma(int order) const {
    const double rho2 = rho * rho;
    double c = gamma / sigma;
    if (order == 1) return std::min(c, 2.0 * (kappa - 0.5 * rho2));
    c = std::min(c, 2.0 * (kappa - rho2));
    const double cross = 1.0 / (2.0 * rho2);
    for (int q = 2; q <= order; ++q) {
        const double delta_q = (q < order) ? kappa - rho2 : kappa - 0.5 * rho2;
        c = std::min(c, 2.0 * (delta_q - cross));
    }
    return c;
}

double feedback_law(double e, double g_norm_sq, double theta_dot_phi, double kappa, double rho) {
    return -(kappa + 0.5 * rho * rho * g_norm_sq) * e - theta_dot_phi;
}

Eigen::VectorXd tracking_errors(const Eigen::VectorXd& x, const Eigen::VectorXd& eta,
                                const Eigen::VectorXd& alphas) {
    const Eigen::Index n = x.size();
    if (eta.size() != n || alphas.size() != n - 1)
        throw ValidationError("tracking_errors: size mismatch");
    Eigen::VectorXd e(n);
    e[0] = x[0] - eta[0];
    for (Eigen::Index q = 1; q < n; ++q) e[q] = x[q] - alphas[q - 1];
    return e;
}

Eigen::VectorXd adapt_step(const Eigen::VectorXd& theta, double e, const Eigen::VectorXd& phi,
                           double gamma, double sigma, double dt) {
    if (dt <= 0.0) throw ValidationError("adapt_step: dt must be > 0");
    if (theta.size() != phi.size()) throw ValidationError("adapt_step: size mismatch");
    const double decay = std::exp(-gamma * sigma * dt);
    Eigen::VectorXd out = decay * theta + ((1.0 - decay) * e / sigma) * phi;
    if (!out.allFinite()) throw DivergenceError("adapt_step: weights went non-finite");
    return out;
}

AgentController::AgentController(int order, const ControllerParams& params)
    : order_(order), params_(params) {
    params_.validate(order);
    lattices_.reserve(order);
    weights_.reserve(order);
    for (int q = 1; q <= order; ++q) {
        int dim;
        if (q == 1) {
            dim = (order >= 2) ? 3 : 2; // (x1, eta1, eta2) or (x1, eta1)
        } else {
            dim = q + 1 + order; // (x_1..x_q, e_{q-1}, eta_1..eta_n)
        }
        lattices_.emplace_back(dim, params_.rbf_per_dim, params_.rbf_lo, params_.rbf_hi);
        weights_.emplace_back(Eigen::VectorXd::Zero(lattices_.back().size()));
    }
}

Eigen::VectorXd AgentController::stage_input(int q_1based, const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& eta, double e_prev) const {
    if (q_1based == 1) {
        Eigen::VectorXd in(order_ >= 2 ? 3 : 2);
        in[0] = x[0];
        in[1] = eta[0];
        if (order_ >= 2) in[2] = eta[1];
        return in;
    }
    Eigen::VectorXd in(q_1based + 1 + order_);
    in.head(q_1based) = x.head(q_1based);
    in[q_1based] = e_prev;
    in.tail(order_) = eta;
    return in;
}

AgentController::Action AgentController::compute(const Eigen::VectorXd& x,
                                                 const Eigen::VectorXd& eta,
                                                 const AgentModel& model) const {
    if (x.size() != order_ || eta.size() != order_)
        throw ValidationError("controller: state size mismatch");

    Action act;
    act.e.resize(order_);
    act.alpha.resize(order_ - 1);
    act.phi.resize(order_);

    double e_prev = 0.0;
    for (int q = 1; q <= order_; ++q) {
        const double e_q = (q == 1) ? x[0] - eta[0] : x[q - 1] - act.alpha[q - 2];
        act.e[q - 1] = e_q;

        const Eigen::VectorXd g = model.noise_gain(q, x.head(q));
        const Eigen::VectorXd phi = lattices_[q - 1].basis(stage_input(q, x, eta, e_prev));
        const double correction = weights_[q - 1].dot(phi);
        const double input =
            feedback_law(e_q, g.squaredNorm(), correction, params_.kappa, params_.rho);

        act.phi[q - 1] = phi;
        if (q < order_) {
            act.alpha[q - 1] = input;
        } else {
            act.u = input;
        }
        e_prev = e_q;
    }
    return act;
}

void AgentController::adapt(const Action& action, double dt) {
    for (int q = 0; q < order_; ++q)
        weights_[q] = adapt_step(weights_[q], action.e[q], action.phi[q], params_.gamma,
                                 params_.sigma, dt);
}

const Eigen::VectorXd& AgentController::weights(int q_1based) const {
    if (q_1based < 1 || q_1based > order_)
        throw ValidationError("controller: stage index out of range");
    return weights_[q_1based - 1];
}

double AgentController::weight_norm(int q_1based) const { return weights(q_1based).norm(); }

} // namespace imc
