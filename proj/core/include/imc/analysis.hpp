#pragma once

#include "imc/design.hpp"
#include "imc/engine.hpp"
#include "imc/schedule.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace imc {

/// Constants of the global Lyapunov envelope, computed exactly from the
/// closed-form expressions given V_e(t0), Lambda, T and the design rates.
struct EnvelopeParams {
    double kappa_const = 0.0; // growth allowance per period
    double pi1 = 0.0;
    double pi2 = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double pi_star = 0.0;  // max(pi1, pi2)
    double eps_star = 0.0; // max(eps1, eps2)
    double lambda = 0.0;   // min over periods
    double t_max = 0.0;    // the period-length constant T
};

EnvelopeParams envelope_params(double ve_t0, double lambda, double t_max,
                               const DesignOutput& design);

struct EnvelopeReport {
    EnvelopeParams params;
    int samples = 0;
    int violations_on = 0;
    int violations_off = 0;
    int violations_global = 0;
    double worst_margin = 0.0; // min over samples of bound*(1+tol) - V_e
    double rel_tol = 0.05;

    [[nodiscard]] int violations() const {
        return violations_on + violations_off + violations_global;
    }
};

/// Tests every sample of V_e against the ON, OFF and global envelopes with a
/// relative tolerance. V_e at a period boundary is taken from the sample at
/// that grid point (boundaries are snapped to the grid).
EnvelopeReport check_envelopes(const Eigen::VectorXd& time, const Eigen::VectorXd& v_e,
                               const ModeSchedule& schedule, const DesignOutput& design,
                               double rel_tol = 0.05);
EnvelopeReport check_envelopes(const SimTrace& trace, const DesignOutput& design,
                               double rel_tol = 0.05);

/// Per-run reduction used by the stochastic gates: the tracking statistic is
/// max_i |z_i - z_r|, reported as sup and mean over the tail window.
struct RunStats {
    bool diverged = false;
    double sup_tail_error = 0.0;  // sup_{t >= tail_start} max_i |z_i - z_r|
    double mean_tail_error = 0.0; // mean over the tail of max_i |z_i - z_r|
    double max_weight_norm = 0.0; // sup over time and agents of ||theta_hat||
    std::vector<double> agent_mean_tail; // per-agent mean |z_i - z_r| over the tail
    std::vector<double> agent_max_tail;  // per-agent max
};
RunStats reduce_run(const SimTrace& trace, double tail_start);

using BandFn = std::function<double(double t)>;

/// Empirical noise-to-state certification: at every grid time, the fraction
/// of runs with max_i |z_i - z_r| inside band(t). A diverged run counts as
/// outside from its divergence time onward.
struct StabilityReport {
    double l0 = 0.1;
    bool pass = false;
    double min_fraction = 1.0;
    Eigen::VectorXd time;
    Eigen::VectorXd fraction;
    // Diagnostics from the closed-loop analysis.
    double l_a = 0.0;                      // sum_q 1/(2 rho^2), from the config
    double c_gamma = 0.0;                  // decay constant of the per-agent V_i bound
    std::vector<double> xi_star;           // per-agent empirical sup E||xi||^2
    std::vector<double> varpi_partial;     // l_a * xi_star (the identifiable part)
    std::vector<double> agent_mean_tail;   // ensemble-averaged tail mean |z_i - z_r|
    std::vector<double> agent_max_tail;    // ensemble-averaged tail max
    std::vector<double> eps_v_estimate;    // per-agent empirical bound (max over runs)
};

StabilityReport certify_nsps(const EnsembleResult& ensemble, double l0, const BandFn& band,
                             const ControllerParams& controller, double tail_start);

/// Per-agent terminal tracking statistics over the final quarter of the
/// horizon, ensemble-averaged. Invariant under run reordering.
struct ConsensusMetrics {
    std::vector<double> agent_mean; // E over runs of mean_tail |z_i - z_r|
    std::vector<double> agent_max;  // E over runs of max_tail |z_i - z_r|
    double overall_mean = 0.0;
    std::vector<double> eps_v_estimate; // per-agent max over runs of the tail mean
};
ConsensusMetrics consensus_metrics(const EnsembleResult& ensemble);

} // namespace imc
