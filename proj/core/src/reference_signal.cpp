#include "imc/reference_signal.hpp"

#include "imc/errors.hpp"

#include <cmath>

namespace imc {

ReferenceSignal::ReferenceSignal(Kind kind, double amplitude, double omega, double phase,
                                 double c_z)
    : kind_(kind), amplitude_(amplitude), omega_(omega), phase_(phase), c_z_(c_z) {
    if (c_z_ <= 0.0) throw ValidationError("reference: c_z must be > 0");
}

ReferenceSignal ReferenceSignal::sine(double amplitude, double omega, double c_z, double phase) {
    if (omega <= 0.0) throw ValidationError("reference: omega must be > 0");
    return ReferenceSignal(Kind::sine, amplitude, omega, phase, c_z);
}

ReferenceSignal ReferenceSignal::constant(double value, double c_z) {
    return ReferenceSignal(Kind::constant, value, 0.0, 0.0, c_z);
}

double ReferenceSignal::eval(double t, int derivative) const {
    switch (kind_) {
    case Kind::constant:
        return derivative == 0 ? amplitude_ : 0.0;
    case Kind::sine:
        // d^l/dt^l sin(wt + p) = w^l sin(wt + p + l pi/2)
        return amplitude_ * std::pow(omega_, derivative) *
               std::sin(omega_ * t + phase_ + 0.5 * M_PI * static_cast<double>(derivative));
    }
    return 0.0;
}

Eigen::VectorXd ReferenceSignal::stacked(int n, double t) const {
    Eigen::VectorXd z(n);
    for (int l = 0; l < n; ++l) z[l] = eval(t, l);
    return z;
}

bool ReferenceSignal::derivative_bound_holds(int order, double horizon, int samples) const {
    for (int l = 1; l <= order; ++l) {
        for (int s = 0; s <= samples; ++s) {
            const double t = horizon * static_cast<double>(s) / static_cast<double>(samples);
            if (std::abs(eval(t, l)) > c_z_ * (1.0 + 1e-12)) return false;
        }
    }
    return true;
}

} // namespace imc
