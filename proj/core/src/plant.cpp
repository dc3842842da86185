#include "imc/plant.hpp"

#include "imc/errors.hpp"
#include "imc/rng.hpp"

#include <cmath>
#include <string>

namespace imc {

namespace {

constexpr double kStateGuard = 1e6;

Eigen::VectorXd derivative(const AgentModel& model, const Eigen::VectorXd& x, double u,
                           const Eigen::VectorXd& xi) {
    const int n = model.order;
    Eigen::VectorXd dx(n);
    for (int q = 1; q <= n; ++q) {
        const Eigen::VectorXd xbar = x.head(q);
        const double f = model.drift(q, xbar);
        const double noise = model.noise_gain(q, xbar).dot(xi);
        const double chain = (q < n) ? x[q] : u;
        dx[q - 1] = chain + f + noise;
        if (!std::isfinite(dx[q - 1]))
            throw DivergenceError("plant: non-finite derivative in component x[" +
                                  std::to_string(q) + "]");
    }
    return dx;
}

} // namespace

void AgentModel::probe(double box_half_width, int samples) const {
    Rng rng(0xb0c5u);
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd x(order);
        for (int q = 0; q < order; ++q) x[q] = rng.uniform(-box_half_width, box_half_width);
        for (int q = 1; q <= order; ++q) {
            const Eigen::VectorXd xbar = x.head(q);
            if (!std::isfinite(drift(q, xbar)))
                throw ValidationError("plant model: drift f_" + std::to_string(q) +
                                      " non-finite on probe box");
            if (!noise_gain(q, xbar).allFinite())
                throw ValidationError("plant model: noise gain g_" + std::to_string(q) +
                                      " non-finite on probe box");
        }
    }
}

AgentModel make_model(const std::string& name, int agent_index_1based, int order, int noise_dim) {
    if (agent_index_1based < 1) throw ValidationError("plant model: agent index must be >= 1");
    if (order < 1 || noise_dim < 1) throw ValidationError("plant model: bad order/noise_dim");

    AgentModel m;
    m.order = order;
    m.noise_dim = noise_dim;

    if (name == "zero") {
        m.drift = [](int, const Eigen::VectorXd&) { return 0.0; };
        m.noise_gain = [noise_dim](int, const Eigen::VectorXd&) {
            return Eigen::VectorXd::Zero(noise_dim).eval();
        };
        return m;
    }

    if (name == "reference" || name == "paper_example") {
        if (order != 2)
            throw ValidationError("plant model '" + name + "' is defined for order 2");
        const double i = static_cast<double>(agent_index_1based);
        m.drift = [i](int q, const Eigen::VectorXd& xbar) {
            const double x1 = xbar[0];
            if (q == 1) return 0.5 * i * x1 * std::sin(x1) * std::cos(x1);
            const double x2 = xbar[1];
            return 0.9 * i * x1 * std::sin(x2) * std::cos(0.3 * x1);
        };
        m.noise_gain = [noise_dim](int q, const Eigen::VectorXd& xbar) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(noise_dim);
            const double x1 = xbar[0];
            if (q == 1) {
                g[0] = 0.5 * x1 * std::sin(x1);
            } else {
                const double x2 = xbar[1];
                g[0] = 0.5 * x1 * std::sin(x1) * std::cos(x2);
            }
            return g;
        };
        return m;
    }

    throw ValidationError("plant model '" + name + "' is not a builtin (use 'reference' or 'zero')");
}

Eigen::VectorXd plant_step(const AgentModel& model, const Eigen::VectorXd& x, double u,
                           const Eigen::VectorXd& xi, double dt, int substeps) {
    if (dt <= 0.0 || substeps < 1) throw ValidationError("plant: bad step size");
    if (x.size() != model.order) throw ValidationError("plant: state size mismatch");
    if (xi.size() != model.noise_dim) throw ValidationError("plant: disturbance size mismatch");

    Eigen::VectorXd state = x;
    const double h = dt / static_cast<double>(substeps);
    for (int s = 0; s < substeps; ++s) {
        const Eigen::VectorXd k1 = derivative(model, state, u, xi);
        const Eigen::VectorXd k2 = derivative(model, state + 0.5 * h * k1, u, xi);
        const Eigen::VectorXd k3 = derivative(model, state + 0.5 * h * k2, u, xi);
        const Eigen::VectorXd k4 = derivative(model, state + h * k3, u, xi);
        state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    for (int q = 0; q < model.order; ++q) {
        if (!std::isfinite(state[q]) || std::abs(state[q]) > kStateGuard)
            throw DivergenceError("plant: state x[" + std::to_string(q + 1) +
                                  "] diverged (|x| > 1e6 or non-finite)");
    }
    return state;
}

} // namespace imc
