#pragma once

#include "imc/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace imc {

struct NoiseParams {
    int dim = 1;                   // disturbance dimension m
    double time_constant = 0.1;    // filter time constant, seconds
    double power = 1.0;            // noise power A (variance * s)
    double correlation_time = 0.1; // white-stage resample period t_c, seconds

    void validate() const;

    /// Standard deviation of one held white-noise sample: sqrt(A / t_c).
    [[nodiscard]] double held_sample_std() const;
};

/// Colored-noise generator: zero-order-held Gaussian white noise (resampled
/// every correlation_time, per-sample variance power/correlation_time) driving
/// a first-order low-pass filter with the given time constant.
///
/// The filter step is the exact exponential update
///   xi+ = e^(-dt/tc_f) xi + (1 - e^(-dt/tc_f)) w,
/// which is exact for piecewise-constant w. Deterministic per seed; one
/// process (= one stream) per agent.
class NoiseProcess {
public:
    NoiseProcess(NoiseParams params, std::uint64_t seed);

    [[nodiscard]] const Eigen::VectorXd& value() const { return xi_; }
    [[nodiscard]] const NoiseParams& params() const { return params_; }

    /// Advances one step of dt <= correlation_time and returns the new value.
    const Eigen::VectorXd& step(double dt);

private:
    void resample();

    NoiseParams params_;
    Rng rng_;
    Eigen::VectorXd xi_;
    Eigen::VectorXd held_white_;
    double hold_remaining_ = 0.0;
};

/// Empirical bound on sup_t E(||xi||^2): maximum over the time grid of the
/// ensemble-averaged squared norm. Member k of the ensemble uses
/// derive_seed(seed, k).
double second_moment_bound(const NoiseParams& params, double horizon, double dt, int ensemble,
                           std::uint64_t seed);

} // namespace imc
