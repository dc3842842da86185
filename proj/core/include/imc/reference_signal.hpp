#pragma once

#include <Eigen/Dense>

#include <string>

namespace imc {

/// Leader trajectory with closed-form derivatives. Derivatives are analytic,
/// never numeric, so the stacked reference is exact at any t.
class ReferenceSignal {
public:
    enum class Kind { sine, constant };

    /// z_r(t) = amplitude * sin(omega t + phase).
    static ReferenceSignal sine(double amplitude, double omega, double c_z, double phase = 0.0);

    /// z_r(t) = value; all derivatives vanish.
    static ReferenceSignal constant(double value, double c_z = 1.0);

    /// l-th derivative at t (l = 0 is the signal itself).
    [[nodiscard]] double eval(double t, int derivative = 0) const;

    /// Stacked reference [z_r, z_r', ..., z_r^(n-1)].
    [[nodiscard]] Eigen::VectorXd stacked(int n, double t) const;

    /// Configured derivative bound c_z with |z_r^(l)| <= c_z for l = 1..n.
    [[nodiscard]] double c_z() const { return c_z_; }
    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] double amplitude() const { return amplitude_; }
    [[nodiscard]] double omega() const { return omega_; }

    /// Numerically verifies the bound on a dense grid over [0, horizon].
    [[nodiscard]] bool derivative_bound_holds(int order, double horizon,
                                              int samples = 4000) const;

private:
    ReferenceSignal(Kind kind, double amplitude, double omega, double phase, double c_z);

    Kind kind_;
    double amplitude_;
    double omega_;
    double phase_;
    double c_z_;
};

} // namespace imc
