#pragma once

#include "imc/design.hpp"

#include <cstdint>
#include <vector>

namespace imc {

enum class Mode { off = 0, on = 1 };

/// One communication period: ON on [tau_on, tau_off), OFF on [tau_off, tau_next).
struct Period {
    double tau_on = 0.0;
    double tau_off = 0.0;
    double tau_next = 0.0;

    [[nodiscard]] double on_duration() const { return tau_off - tau_on; }
    [[nodiscard]] double off_duration() const { return tau_next - tau_off; }
    [[nodiscard]] double total() const { return tau_next - tau_on; }
};

/// Alternating ON/OFF timeline. First period starts at t = 0; periods are
/// contiguous and strictly ordered. Immutable after construction.
class ModeSchedule {
public:
    explicit ModeSchedule(std::vector<Period> periods);

    [[nodiscard]] const std::vector<Period>& periods() const { return periods_; }
    [[nodiscard]] double end_time() const { return periods_.back().tau_next; }
    [[nodiscard]] double t_max() const { return t_max_; } // max observed period length

    /// Interval membership with half-open conventions: t == tau_on is ON,
    /// t == tau_off is OFF. Throws for t outside [0, end_time()).
    [[nodiscard]] Mode mode_at(double t) const;

private:
    std::vector<Period> periods_;
    double t_max_ = 0.0;
};

struct ScheduleParams {
    double on_lo = 0.5;        // seconds, lower bound of the uniform ON draw
    double on_hi = 2.0;        // upper bound
    double off_fraction = 0.9; // OFF duration = off_fraction * ON * max_off_ratio
    std::uint64_t seed = 1;
    double snap_dt = 0.0; // > 0 snaps every switch to this grid

    void validate() const;
};

/// Draws ON durations uniformly from [on_lo, on_hi] with the seeded stream,
/// sets each OFF duration to off_fraction * ON * design.max_off_ratio, and
/// emits periods until the timeline covers [0, horizon].
ModeSchedule generate_schedule(const ScheduleParams& params, const DesignOutput& design,
                               double horizon);

/// Per-period resilience certificate: Lambda = delta_alpha * ON - delta_beta * OFF,
/// feasible iff Lambda > 0 (strict, evaluated with a 1e-12 slack against
/// rounding in the boundary case).
struct PeriodCertificate {
    int kappa = 0;
    double lambda_k = 0.0;
    bool feasible = false;
};

struct ScheduleCertificate {
    std::vector<PeriodCertificate> periods;
    double lambda = 0.0; // min over periods
    bool feasible = false;
};

ScheduleCertificate certify(const ModeSchedule& schedule, const DesignOutput& design);

} // namespace imc
