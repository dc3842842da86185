#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace imc {

/// Strict-feedback agent dynamics:
///   x_q' = x_{q+1} + f_q(x_1..x_q) + g_q(x_1..x_q)^T xi,  q < n
///   x_n' = u       + f_n(x_1..x_n) + g_n(x_1..x_n)^T xi
/// The drift f is unknown to the controller; the noise gain g is known.
struct AgentModel {
    int order = 2;
    int noise_dim = 1;
    /// f_q; q is 1-based, xbar carries the first q states.
    std::function<double(int q, const Eigen::VectorXd& xbar)> drift;
    /// g_q in R^m; same conventions.
    std::function<Eigen::VectorXd(int q, const Eigen::VectorXd& xbar)> noise_gain;

    /// Probes drift/gain over a state box and throws if any value is
    /// non-finite.
    void probe(double box_half_width = 5.0, int samples = 64) const;
};

/// Builtin models, selected by name in the experiment config.
///  - "reference" (alias "paper_example"): the heterogeneous second-order
///    benchmark nonlinearities, scaled by the 1-based agent index.
///  - "zero": f = 0, g = 0 for any order (equilibrium and integrator tests).
AgentModel make_model(const std::string& name, int agent_index_1based, int order, int noise_dim);

/// One RK4 step of the agent dynamics with u and xi held constant.
/// substeps > 1 subdivides the integration step under the same held inputs.
/// Throws DivergenceError when a derivative goes non-finite or any state
/// exceeds the 1e6 guard, identifying the offending component.
Eigen::VectorXd plant_step(const AgentModel& model, const Eigen::VectorXd& x, double u,
                           const Eigen::VectorXd& xi, double dt, int substeps = 1);

} // namespace imc
