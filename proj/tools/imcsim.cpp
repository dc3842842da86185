// imcsim: gain synthesis, schedule certification, closed-loop simulation and
// Monte Carlo certification for intermittently-communicating multi-agent
// tracking consensus.

#include "imc/analysis.hpp"
#include "imc/config.hpp"
#include "imc/engine.hpp"
#include "imc/errors.hpp"
#include "imc/refcase.hpp"
#include "imc/trace_io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_file;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_file, "Experiment config file (JSON)")
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--out-dir", args.out_dir, "Output directory (overrides config)");
    cmd->add_option("--override", args.overrides,
                    "Config override, section.key=value (repeatable)");
    cmd->add_option("--seed", args.seed,
                    "Master seed; switches all component seeds to derived mode");
}

imc::ExperimentConfig load_config(const CommonArgs& args) {
    imc::ExperimentConfig cfg =
        args.config_file.empty() ? imc::ExperimentConfig::from_json_text("{}", args.overrides)
                                 : imc::ExperimentConfig::load(args.config_file, args.overrides);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed) {
        cfg.sim.master_seed = *args.seed;
        cfg.sim.noise_seeds.clear();
        cfg.sim.init_seed = imc::derive_seed(*args.seed, 2);
        cfg.sim.schedule.seed = imc::derive_seed(*args.seed, 3);
    }
    return cfg;
}

void print_matrix(std::ostream& os, const Eigen::MatrixXd& m, const std::string& name) {
    os << name << " =\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        os << "  [";
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            os << (c ? ", " : " ") << m(r, c);
        os << " ]\n";
    }
}

int cmd_design(const CommonArgs& args) {
    const imc::ExperimentConfig cfg = load_config(args);
    const imc::Prepared prep = imc::prepare(cfg.sim);

    std::cout << "design report\n=============\n";
    std::cout << "lambda_min(L+B)   = " << prep.lambda_min << "\n";
    std::cout << "pinning condition: c0*lambda_min = "
              << cfg.sim.design.c0 * prep.lambda_min << " >= 1\n";
    print_matrix(std::cout, prep.design.P, "P");
    std::cout << "margin mu         = " << prep.riccati.margin << "\n";
    print_matrix(std::cout, prep.riccati.residual_riccati, "residual (Riccati)");
    print_matrix(std::cout, prep.riccati.residual_decay, "residual (decay)");
    std::cout << "K                 = [" << prep.design.K << "]\n";
    std::cout << "||P||             = " << prep.design.p_norm << "\n";
    std::cout << "c_alpha1          = " << prep.design.c_alpha1 << "\n";
    std::cout << "delta_alpha       = " << prep.design.delta_alpha << "\n";
    std::cout << "delta_beta        = " << prep.design.delta_beta << "\n";
    std::cout << "c_beta            = " << prep.design.c_beta << "\n";
    std::cout << "max OFF budget    = " << 100.0 * prep.design.max_off_ratio << " % of ON\n";

    const imc::DesignInputs& in = cfg.sim.design;
    if (cfg.sim.chain.order == 2 && in.c0 == imc::refcase::c0 && in.c1 == imc::refcase::c1 &&
        in.c2 == imc::refcase::c2 && in.c3 == imc::refcase::c3 && in.c_z == imc::refcase::c_z &&
        in.n_followers == imc::refcase::n_followers) {
        // Known-good solution of the reference constants, as a cross-check.
        const imc::DesignOutput ref = imc::rates(imc::refcase::published_P(), in);
        std::cout << "reference cross-check (known-good P):\n";
        std::cout << "  delta_alpha     = " << ref.delta_alpha << "\n";
        std::cout << "  delta_beta      = " << ref.delta_beta << "\n";
        std::cout << "  K               = [" << ref.K << "]\n";
        std::cout << "  max OFF budget  = " << 100.0 * ref.max_off_ratio << " % of ON\n";
        std::cout << "  residuals pass eps=1e-3: "
                  << (imc::check_inequalities(imc::refcase::published_P(), cfg.sim.chain, in.c1,
                                              in.c3, 1e-3)
                          ? "yes"
                          : "NO")
                  << "\n";
    }

    imc::write_design_json(cfg.out_dir / "design.json", prep.design, prep.riccati,
                           prep.lambda_min, cfg.sim.design);
    std::cout << "wrote " << (cfg.out_dir / "design.json").string() << "\n";
    return 0;
}

int cmd_certify_schedule(const CommonArgs& args) {
    const imc::ExperimentConfig cfg = load_config(args);
    const imc::Prepared prep = imc::prepare(cfg.sim);

    imc::ScheduleParams sp = cfg.sim.schedule;
    if (sp.snap_dt == 0.0) sp.snap_dt = cfg.sim.dt;
    const imc::ModeSchedule schedule = imc::generate_schedule(sp, prep.design, cfg.sim.horizon);
    const imc::ScheduleCertificate cert = imc::certify(schedule, prep.design);

    std::cout << "schedule certificate (" << schedule.periods().size() << " periods, T = "
              << schedule.t_max() << " s)\n";
    std::cout << "kappa  tau_on    tau_off   tau_next  Lambda_k  feasible\n";
    for (std::size_t k = 0; k < schedule.periods().size(); ++k) {
        const auto& p = schedule.periods()[k];
        const auto& c = cert.periods[k];
        std::cout << k << "  " << p.tau_on << "  " << p.tau_off << "  " << p.tau_next << "  "
                  << c.lambda_k << "  " << (c.feasible ? "yes" : "NO") << "\n";
    }
    std::cout << "global Lambda = " << cert.lambda << " -> "
              << (cert.feasible ? "feasible" : "INFEASIBLE") << "\n";

    imc::write_schedule_csv(cfg.out_dir / "schedule.csv", schedule, cert);
    std::cout << "wrote " << (cfg.out_dir / "schedule.csv").string() << "\n";
    if (!cert.feasible)
        throw imc::InfeasibleError("schedule infeasible: Lambda_min = " +
                                   std::to_string(cert.lambda));
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    const imc::ExperimentConfig cfg = load_config(args);
    const imc::Prepared prep = imc::prepare(cfg.sim);
    const imc::SimTrace trace = imc::run(cfg.sim, prep, imc::seeds_for_run(cfg.sim, 0));

    imc::write_design_json(cfg.out_dir / "design.json", prep.design, prep.riccati,
                           prep.lambda_min, cfg.sim.design);
    const imc::ModeSchedule schedule = trace.schedule();
    imc::write_schedule_csv(cfg.out_dir / "schedule.csv", schedule,
                            imc::certify(schedule, prep.design));
    imc::write_trace_csv(cfg.out_dir / "trace.csv", trace);

    const imc::EnvelopeReport env = imc::check_envelopes(trace, prep.design);
    imc::write_envelope_report(cfg.out_dir / "envelope_report.csv", env);

    std::ofstream summary(cfg.out_dir / "summary.txt");
    summary << "rows: " << trace.rows() << "\n";
    summary << "diverged: " << (trace.diverged ? trace.divergence_reason : "no") << "\n";
    summary << "envelope violations (on/off/global): " << env.violations_on << "/"
            << env.violations_off << "/" << env.violations_global << "\n";
    summary << "worst envelope margin: " << env.worst_margin << "\n";

    std::cout << "trace rows        = " << trace.rows() << "\n";
    std::cout << "envelope violations = " << env.violations() << " (worst margin "
              << env.worst_margin << ")\n";
    std::cout << "wrote trace.csv, schedule.csv, design.json, envelope_report.csv, summary.txt in "
              << cfg.out_dir.string() << "\n";

    if (trace.diverged) throw imc::DivergenceError(trace.divergence_reason);
    return 0;
}

int cmd_montecarlo(const CommonArgs& args, int runs, double l0, double band, double tail,
                   bool calibrate) {
    imc::ExperimentConfig cfg = load_config(args);

    if (calibrate) {
        // Streaming reduction: traces are not retained, suitable for large
        // calibration batches.
        const imc::Prepared prep = imc::prepare(cfg.sim);
        std::vector<double> sups;
        double max_w = 0.0;
        int diverged = 0;
        for (int k = 0; k < runs; ++k) {
            const imc::SimTrace tr = imc::run(cfg.sim, prep, imc::seeds_for_run(cfg.sim, k));
            const imc::RunStats rs = imc::reduce_run(tr, tail);
            if (rs.diverged) ++diverged;
            sups.push_back(rs.sup_tail_error);
            max_w = std::max(max_w, rs.max_weight_norm);
        }
        std::sort(sups.begin(), sups.end());
        const auto idx = static_cast<std::size_t>(0.95 * (sups.size() - 1));
        std::cout << "calibration over " << runs << " runs (tail >= " << tail << " s)\n";
        std::cout << "sup tail error: p50 = " << sups[sups.size() / 2]
                  << ", p95 = " << sups[idx] << ", max = " << sups.back() << "\n";
        std::cout << "max weight norm = " << max_w << "\n";
        std::cout << "diverged runs   = " << diverged << "\n";
        return 0;
    }

    const imc::Prepared prep = imc::prepare(cfg.sim);
    imc::EnsembleResult ensemble = imc::run_ensemble(cfg.sim, runs);

    imc::write_design_json(cfg.out_dir / "design.json", prep.design, prep.riccati,
                           prep.lambda_min, cfg.sim.design);
    imc::write_ensemble_summary(cfg.out_dir / "ensemble_summary.csv", ensemble, tail);
    const int keep = std::min<int>(cfg.write_traces, runs);
    for (int k = 0; k < keep; ++k)
        imc::write_trace_csv(cfg.out_dir / ("trace_run" + std::to_string(k) + ".csv"),
                             ensemble.traces[static_cast<std::size_t>(k)]);

    const imc::BandFn band_fn = [band, tail](double t) {
        return t < tail ? std::numeric_limits<double>::infinity() : band;
    };
    const imc::StabilityReport stab =
        imc::certify_nsps(ensemble, l0, band_fn, cfg.sim.controller, tail);
    imc::write_stability_report(cfg.out_dir / "nsps_fraction.csv", stab);

    const imc::ConsensusMetrics metrics = imc::consensus_metrics(ensemble);
    std::ofstream summary(cfg.out_dir / "summary.txt");
    summary << "runs: " << runs << "\n";
    summary << "diverged: " << ensemble.diverged_count << "\n";
    summary << "nsps pass: " << (stab.pass ? "yes" : "no") << " (min fraction "
            << stab.min_fraction << ", l0 " << l0 << ", band " << band << ")\n";
    for (std::size_t i = 0; i < metrics.agent_mean.size(); ++i)
        summary << "agent " << i + 1 << ": tail mean |z-z_r| = " << metrics.agent_mean[i]
                << ", tail max = " << metrics.agent_max[i]
                << ", eps_v estimate = " << metrics.eps_v_estimate[i] << "\n";

    std::cout << "runs = " << runs << ", diverged = " << ensemble.diverged_count << "\n";
    std::cout << "NSpS-P certification: " << (stab.pass ? "PASS" : "FAIL")
              << " (min fraction " << stab.min_fraction << " vs 1-l0 = " << 1.0 - l0 << ")\n";
    std::cout << "overall tail mean |z - z_r| = " << metrics.overall_mean << "\n";
    std::cout << "wrote reports in " << cfg.out_dir.string() << "\n";

    if (ensemble.diverged_count > 0)
        throw imc::DivergenceError(std::to_string(ensemble.diverged_count) + " runs diverged");
    if (!stab.pass) return static_cast<int>(imc::ExitCode::certification);
    return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out_dir_opt) {
    const fs::path in = in_dir;
    const fs::path out = out_dir_opt.empty() ? in : fs::path(out_dir_opt);

    const imc::DesignRecord rec = imc::read_design_json(in / "design.json");
    const imc::SimTrace trace = imc::read_trace_csv(in / "trace.csv");
    const imc::ModeSchedule schedule = imc::read_schedule_csv(in / "schedule.csv");

    const imc::EnvelopeReport env =
        imc::check_envelopes(trace.time, trace.V_e, schedule, rec.design);
    imc::write_envelope_report(out / "envelope_report.csv", env);

    imc::EnsembleResult single;
    single.traces.push_back(trace);
    const imc::ConsensusMetrics metrics = imc::consensus_metrics(single);

    std::ofstream summary(out / "summary.txt");
    summary << "rows: " << trace.rows() << "\n";
    summary << "envelope violations (on/off/global): " << env.violations_on << "/"
            << env.violations_off << "/" << env.violations_global << "\n";
    summary << "worst envelope margin: " << env.worst_margin << "\n";
    for (std::size_t i = 0; i < metrics.agent_mean.size(); ++i)
        summary << "agent " << i + 1 << ": tail mean |z-z_r| = " << metrics.agent_mean[i]
                << ", tail max = " << metrics.agent_max[i] << "\n";

    std::cout << "envelope violations = " << env.violations() << "\n";
    std::cout << "wrote envelope_report.csv, summary.txt in " << out.string() << "\n";
    return env.violations() == 0 ? 0 : static_cast<int>(imc::ExitCode::certification);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tracking-consensus simulator for multi-agent systems under "
                 "intermittent communication and colored-noise disturbance"};
    app.require_subcommand(1);

    CommonArgs design_args;
    CLI::App* design = app.add_subcommand("design", "Solve the gain synthesis and report rates");
    add_common(design, design_args);

    CommonArgs certify_args;
    CLI::App* certify =
        app.add_subcommand("certify-schedule", "Generate and certify an ON/OFF schedule");
    add_common(certify, certify_args);

    CommonArgs simulate_args;
    CLI::App* simulate = app.add_subcommand("simulate", "One closed-loop run with reports");
    add_common(simulate, simulate_args);

    CommonArgs mc_args;
    int mc_runs = 20;
    double mc_l0 = 0.1;
    double mc_band = imc::refcase::nsps_band;
    double mc_tail = imc::refcase::nsps_tail_start;
    bool mc_calibrate = false;
    CLI::App* mc = app.add_subcommand("montecarlo", "Run an ensemble and certify NSpS-P");
    add_common(mc, mc_args);
    mc->add_option("-r,--runs", mc_runs, "Number of runs")->check(CLI::PositiveNumber);
    mc->add_option("--l0", mc_l0, "Certification risk level");
    mc->add_option("--band", mc_band, "Tracking band |z - z_r|");
    mc->add_option("--tail", mc_tail, "Band applies for t >= tail (s)");
    mc->add_flag("--calibrate", mc_calibrate, "Streaming calibration, prints percentiles only");

    std::string report_in, report_out;
    CLI::App* report = app.add_subcommand("report", "Re-analyze a written run directory");
    report->add_option("-i,--in-dir", report_in, "Directory with trace.csv, design.json, schedule.csv")
        ->required();
    report->add_option("-o,--out-dir", report_out, "Report output directory (default: in-dir)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) return cmd_design(design_args);
        if (certify->parsed()) return cmd_certify_schedule(certify_args);
        if (simulate->parsed()) return cmd_simulate(simulate_args);
        if (mc->parsed())
            return cmd_montecarlo(mc_args, mc_runs, mc_l0, mc_band, mc_tail, mc_calibrate);
        if (report->parsed()) return cmd_report(report_in, report_out);
    } catch (const imc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(imc::ExitCode::usage);
    }
    return 0;
}
