#include "imc/schedule.hpp"

#include "imc/errors.hpp"
#include "imc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace imc {

namespace {

constexpr double kStrictSlack = 1e-12;

double snap(double value, double grid) {
    if (grid <= 0.0) return value;
    return std::round(value / grid) * grid;
}

} // namespace

ModeSchedule::ModeSchedule(std::vector<Period> periods) : periods_(std::move(periods)) {
    if (periods_.empty()) throw ValidationError("schedule: at least one period required");
    if (periods_.front().tau_on != 0.0)
        throw ValidationError("schedule: first period must start at t = 0");
    double prev_end = 0.0;
    for (std::size_t k = 0; k < periods_.size(); ++k) {
        const Period& p = periods_[k];
        if (!(p.tau_on < p.tau_off && p.tau_off <= p.tau_next))
            throw ValidationError("schedule: period " + std::to_string(k) +
                                  " violates tau_on < tau_off <= tau_next");
        if (k > 0 && p.tau_on != prev_end)
            throw ValidationError("schedule: period " + std::to_string(k) +
                                  " does not start where the previous one ended");
        prev_end = p.tau_next;
        t_max_ = std::max(t_max_, p.total());
    }
}

Mode ModeSchedule::mode_at(double t) const {
    if (t < 0.0 || t >= end_time())
        throw ValidationError("mode_at: t = " + std::to_string(t) +
                              " outside schedule range [0, " + std::to_string(end_time()) + ")");
    // First period with tau_on > t, then step back.
    auto it = std::upper_bound(periods_.begin(), periods_.end(), t,
                               [](double v, const Period& p) { return v < p.tau_on; });
    const Period& p = *(it - 1);
    return t < p.tau_off ? Mode::on : Mode::off;
}

void ScheduleParams::validate() const {
    if (on_lo <= 0.0 || on_hi < on_lo)
        throw ValidationError("schedule: ON range must satisfy 0 < on_lo <= on_hi");
    if (off_fraction < 0.0 || off_fraction > 1.0)
        throw ValidationError("schedule: off_fraction must lie in [0, 1]");
    if (snap_dt < 0.0) throw ValidationError("schedule: snap_dt must be >= 0");
}

ModeSchedule generate_schedule(const ScheduleParams& params, const DesignOutput& design,
                               double horizon) {
    params.validate();
    if (horizon < 0.0) throw ValidationError("schedule: horizon must be >= 0");

    Rng rng(params.seed);
    std::vector<Period> periods;
    double t = 0.0;
    // Cover [0, horizon] inclusive so the final sample of a run still has a mode.
    while (t <= horizon || periods.empty()) {
        const double g = rng.uniform(params.on_lo, params.on_hi);
        const double c = params.off_fraction * g * design.max_off_ratio;
        Period p;
        p.tau_on = t;
        p.tau_off = t + g;
        p.tau_next = t + g + c;
        if (params.snap_dt > 0.0) {
            // Snap the absolute switch times so every boundary is bit-equal
            // to a grid sample k * snap_dt, with no accumulation drift.
            p.tau_off = std::max(p.tau_on + params.snap_dt, snap(p.tau_off, params.snap_dt));
            p.tau_next = std::max(p.tau_off, snap(p.tau_next, params.snap_dt));
        }
        periods.push_back(p);
        t = p.tau_next;
    }
    return ModeSchedule(std::move(periods));
}

ScheduleCertificate certify(const ModeSchedule& schedule, const DesignOutput& design) {
    ScheduleCertificate cert;
    cert.lambda = std::numeric_limits<double>::infinity();
    cert.feasible = true;

    int kappa = 0;
    for (const Period& p : schedule.periods()) {
        PeriodCertificate pc;
        pc.kappa = kappa++;
        pc.lambda_k = design.delta_alpha * p.on_duration() - design.delta_beta * p.off_duration();
        pc.feasible = pc.lambda_k > kStrictSlack;
        cert.lambda = std::min(cert.lambda, pc.lambda_k);
        cert.feasible = cert.feasible && pc.feasible;
        cert.periods.push_back(pc);
    }
    return cert;
}

} // namespace imc
