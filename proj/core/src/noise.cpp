#include "imc/noise.hpp"

#include "imc/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace imc {

void NoiseParams::validate() const {
    if (dim < 1) throw ValidationError("noise: dim must be >= 1");
    if (time_constant <= 0.0) throw ValidationError("noise: time_constant must be > 0");
    if (power < 0.0) throw ValidationError("noise: power must be >= 0");
    if (correlation_time <= 0.0) throw ValidationError("noise: correlation_time must be > 0");
}

double NoiseParams::held_sample_std() const { return std::sqrt(power / correlation_time); }

NoiseProcess::NoiseProcess(NoiseParams params, std::uint64_t seed)
    : params_(params), rng_(seed), xi_(Eigen::VectorXd::Zero(params.dim)),
      held_white_(Eigen::VectorXd::Zero(params.dim)) {
    params_.validate();
    resample(); // first hold covers [0, t_c)
}

void NoiseProcess::resample() {
    const double sd = params_.held_sample_std();
    for (Eigen::Index j = 0; j < held_white_.size(); ++j) held_white_[j] = sd * rng_.gaussian();
    hold_remaining_ += params_.correlation_time;
}

const Eigen::VectorXd& NoiseProcess::step(double dt) {
    if (dt <= 0.0) throw ValidationError("noise: dt must be > 0");
    if (dt > params_.correlation_time * (1.0 + 1e-9))
        throw ValidationError("noise: step larger than correlation time (dt = " +
                              std::to_string(dt) + ")");

    const double decay = std::exp(-dt / params_.time_constant);
    xi_ = decay * xi_ + (1.0 - decay) * held_white_;

    hold_remaining_ -= dt;
    // Resample at the first grid point at or past the nominal boundary.
    if (hold_remaining_ <= 1e-9 * params_.correlation_time) resample();
    return xi_;
}

double second_moment_bound(const NoiseParams& params, double horizon, double dt, int ensemble,
                           std::uint64_t seed) {
    params.validate();
    if (ensemble < 10) throw ValidationError("second_moment_bound: ensemble must be >= 10");
    if (dt <= 0.0 || horizon < dt) throw ValidationError("second_moment_bound: bad horizon/dt");

    std::vector<NoiseProcess> procs;
    procs.reserve(static_cast<std::size_t>(ensemble));
    for (int k = 0; k < ensemble; ++k) procs.emplace_back(params, derive_seed(seed, k));

    const int steps = static_cast<int>(std::llround(horizon / dt));
    double worst = 0.0;
    for (int s = 0; s < steps; ++s) {
        double acc = 0.0;
        for (auto& p : procs) acc += p.step(dt).squaredNorm();
        worst = std::max(worst, acc / static_cast<double>(ensemble));
    }
    return worst;
}

} // namespace imc
