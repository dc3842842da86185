#pragma once

#include "imc/analysis.hpp"
#include "imc/design.hpp"
#include "imc/engine.hpp"
#include "imc/schedule.hpp"

#include <filesystem>
#include <string>

namespace imc {

/// Fixed-layout trace CSV, one row per grid step. Header:
///   time,mode,z_r,V_e, then per agent i: eta{i}_{q}, zeta{i}_{q}, x{i}_{q},
///   e{i}_{q}, alpha{i}_{q} (q < n), u{i}, xi{i}_{j}, thetanorm{i}_{q}, V{i}.
/// A diverged run is truncated and annotated with a trailing comment line.
/// Numbers are written with %.17g so re-reading is lossless.
void write_trace_csv(const std::filesystem::path& path, const SimTrace& trace);
SimTrace read_trace_csv(const std::filesystem::path& path);

/// Per-period schedule rows: kappa, tau_on, tau_off, tau_next, durations,
/// Lambda_kappa and the feasibility flag.
void write_schedule_csv(const std::filesystem::path& path, const ModeSchedule& schedule,
                        const ScheduleCertificate& cert);
ModeSchedule read_schedule_csv(const std::filesystem::path& path);

/// Machine-readable design record consumed by `schedule` and the engine.
void write_design_json(const std::filesystem::path& path, const DesignOutput& design,
                       const RiccatiSolution& solution, double lambda_min,
                       const DesignInputs& inputs);
struct DesignRecord {
    DesignOutput design;
    double lambda_min = 0.0;
    DesignInputs inputs;
};
DesignRecord read_design_json(const std::filesystem::path& path);

void write_envelope_report(const std::filesystem::path& csv_path, const EnvelopeReport& report);
void write_stability_report(const std::filesystem::path& csv_path,
                            const StabilityReport& report);
void write_ensemble_summary(const std::filesystem::path& csv_path,
                            const EnsembleResult& ensemble, double tail_start);

} // namespace imc
