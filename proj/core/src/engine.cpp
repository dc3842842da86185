#include "imc/engine.hpp"

#include "imc/errors.hpp"
#include "imc/rng.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

namespace imc {

namespace {

bool divides(double small, double big, double rel_tol = 1e-9) {
    const double ratio = big / small;
    return std::abs(ratio - std::round(ratio)) <= rel_tol * std::max(1.0, ratio);
}

} // namespace

void SimConfig::validate() const {
    if (chain.order < 1) throw ValidationError("sim: chain order must be >= 1");
    if (dt <= 0.0) throw ValidationError("sim: dt must be > 0");
    if (horizon < 0.0) throw ValidationError("sim: horizon must be >= 0");
    if (substeps < 1) throw ValidationError("sim: substeps must be >= 1");
    if (init_lo > init_hi) throw ValidationError("sim: init_lo must be <= init_hi");

    design.validate();
    if (design.n_followers != graph.n())
        throw ValidationError("sim: design.n_followers must match the graph size");

    schedule.validate();
    noise.validate();
    if (dt > noise.correlation_time * (1.0 + 1e-9))
        throw ValidationError("sim: dt must not exceed the noise correlation time");
    if (!divides(dt, noise.correlation_time))
        throw ValidationError("sim: dt must divide the noise correlation time");

    if (!noise_seeds.empty() && static_cast<int>(noise_seeds.size()) != graph.n())
        throw ValidationError("sim: noise_seeds must be empty or have one entry per agent");

    controller.validate(chain.order);

    if (eta0.size() != 0 && (eta0.rows() != chain.order || eta0.cols() != graph.n()))
        throw ValidationError("sim: eta0 must be order x n_agents");

    if (!reference.derivative_bound_holds(chain.order, std::max(horizon, 1.0)))
        throw ValidationError("sim: reference derivatives exceed the configured c_z bound");
}

Prepared prepare(const SimConfig& cfg) {
    cfg.validate();

    Prepared prep;
    prep.lambda_min = cfg.graph.min_eig_pinned_laplacian();
    prep.design = design_chain(cfg.chain, prep.lambda_min, cfg.design, SolveOptions{},
                               &prep.riccati);
    for (int i = 0; i < cfg.graph.n(); ++i)
        make_model(cfg.plant_model, i + 1, cfg.chain.order, cfg.noise.dim).probe();
    return prep;
}

RunSeeds seeds_for_run(const SimConfig& cfg, int run_index) {
    // Ensemble randomness lives in the disturbance streams only: initial
    // conditions and the schedule keep their config seeds across runs, so a
    // zero-power ensemble collapses to identical deterministic runs.
    RunSeeds seeds;
    seeds.init = cfg.init_seed;
    seeds.schedule = cfg.schedule.seed;
    const int n_agents = cfg.graph.n();
    if (run_index == 0) {
        if (!cfg.noise_seeds.empty()) {
            seeds.noise = cfg.noise_seeds;
        } else {
            for (int i = 0; i < n_agents; ++i)
                seeds.noise.push_back(derive_seed(cfg.master_seed, 1000 + i));
        }
        return seeds;
    }
    const std::uint64_t sub = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(run_index));
    for (int i = 0; i < n_agents; ++i) seeds.noise.push_back(derive_seed(sub, 1000 + i));
    return seeds;
}

namespace {

void allocate(SimTrace& tr, Eigen::Index rows, int order, int n_agents, int noise_dim) {
    tr.order = order;
    tr.n_agents = n_agents;
    tr.noise_dim = noise_dim;
    tr.time.setZero(rows);
    tr.mode.setZero(rows);
    tr.z_r.setZero(rows);
    tr.V_e.setZero(rows);
    tr.eta.setZero(rows, n_agents * order);
    tr.zeta.setZero(rows, n_agents * order);
    tr.x.setZero(rows, n_agents * order);
    tr.e.setZero(rows, n_agents * order);
    tr.alpha.setZero(rows, n_agents * std::max(order - 1, 0));
    tr.u.setZero(rows, n_agents);
    tr.xi.setZero(rows, n_agents * noise_dim);
    tr.theta_norm.setZero(rows, n_agents * order);
    tr.V_agent.setZero(rows, n_agents);
}

void truncate(SimTrace& tr, Eigen::Index rows) {
    tr.time.conservativeResize(rows);
    tr.mode.conservativeResize(rows);
    tr.z_r.conservativeResize(rows);
    tr.V_e.conservativeResize(rows);
    tr.eta.conservativeResize(rows, Eigen::NoChange);
    tr.zeta.conservativeResize(rows, Eigen::NoChange);
    tr.x.conservativeResize(rows, Eigen::NoChange);
    tr.e.conservativeResize(rows, Eigen::NoChange);
    tr.alpha.conservativeResize(rows, Eigen::NoChange);
    tr.u.conservativeResize(rows, Eigen::NoChange);
    tr.xi.conservativeResize(rows, Eigen::NoChange);
    tr.theta_norm.conservativeResize(rows, Eigen::NoChange);
    tr.V_agent.conservativeResize(rows, Eigen::NoChange);
}

} // namespace

SimTrace run(const SimConfig& cfg, const Prepared& prep, const RunSeeds& seeds) {
    cfg.validate();
    const int order = cfg.chain.order;
    const int n_agents = cfg.graph.n();
    const int m = cfg.noise.dim;
    const auto steps = static_cast<Eigen::Index>(std::llround(cfg.horizon / cfg.dt));

    ScheduleParams sp = cfg.schedule;
    sp.seed = seeds.schedule;
    if (sp.snap_dt == 0.0) sp.snap_dt = cfg.dt;
    const ModeSchedule schedule = generate_schedule(sp, prep.design, cfg.horizon);
    const ScheduleCertificate cert = certify(schedule, prep.design);
    if (!cert.feasible)
        throw InfeasibleError("schedule: per-period resilience condition fails (Lambda_min = " +
                              std::to_string(cert.lambda) + ")");

    std::vector<AgentModel> models;
    std::vector<AgentController> controllers;
    std::vector<NoiseProcess> noise;
    models.reserve(n_agents);
    controllers.reserve(n_agents);
    noise.reserve(n_agents);
    for (int i = 0; i < n_agents; ++i) {
        models.push_back(make_model(cfg.plant_model, i + 1, order, m));
        controllers.emplace_back(order, cfg.controller);
        noise.emplace_back(cfg.noise, seeds.noise[static_cast<std::size_t>(i)]);
    }

    Rng init_rng(seeds.init);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(order, n_agents);
    for (int i = 0; i < n_agents; ++i) x(0, i) = init_rng.uniform(cfg.init_lo, cfg.init_hi);

    const Eigen::MatrixXd eta0 =
        cfg.eta0.size() != 0 ? cfg.eta0 : Eigen::MatrixXd::Zero(order, n_agents);
    VirtualLayer vl(cfg.chain, cfg.graph, prep.design.K, eta0);

    SimTrace tr;
    tr.dt = cfg.dt;
    tr.schedule_periods = schedule.periods();
    allocate(tr, steps + 1, order, n_agents, m);

    Eigen::Index complete_rows = 0;
    try {
        for (Eigen::Index k = 0; k <= steps; ++k) {
            const double t = static_cast<double>(k) * cfg.dt;
            const Eigen::VectorXd zbar = cfg.reference.stacked(order, t);
            const Mode mode = schedule.mode_at(t);
            const Eigen::MatrixXd zeta = vl.zetas(zbar, mode);

            tr.time[k] = t;
            tr.mode[k] = (mode == Mode::on) ? 1 : 0;
            tr.z_r[k] = zbar[0];
            tr.V_e[k] = lyapunov_Ve(vl.etas(), zbar, prep.design.P);
            for (int i = 0; i < n_agents; ++i) {
                tr.eta.row(k).segment(i * order, order) = vl.etas().col(i).transpose();
                tr.zeta.row(k).segment(i * order, order) = zeta.col(i).transpose();
                tr.x.row(k).segment(i * order, order) = x.col(i).transpose();
            }

            const bool terminal = (k == steps);
            if (!terminal) {
                // Per-step ordering: mode -> zeta -> step eta -> controller ->
                // adapt -> sample noise -> step plant. The controller reads the
                // freshly stepped virtual state.
                vl.step(zeta, cfg.dt, cfg.substeps);
            }

            for (int i = 0; i < n_agents; ++i) {
                const AgentController::Action act =
                    controllers[static_cast<std::size_t>(i)].compute(x.col(i), vl.etas().col(i),
                                                                     models[static_cast<std::size_t>(i)]);
                tr.e.row(k).segment(i * order, order) = act.e.transpose();
                if (order > 1)
                    tr.alpha.row(k).segment(i * (order - 1), order - 1) = act.alpha.transpose();
                tr.u(k, i) = act.u;
                tr.V_agent(k, i) = 0.5 * act.e.squaredNorm();

                if (!terminal) {
                    controllers[static_cast<std::size_t>(i)].adapt(act, cfg.dt);
                    const Eigen::VectorXd& xi_val = noise[static_cast<std::size_t>(i)].step(cfg.dt);
                    tr.xi.row(k).segment(i * m, m) = xi_val.transpose();
                    x.col(i) = plant_step(models[static_cast<std::size_t>(i)], x.col(i), act.u,
                                          xi_val, cfg.dt, cfg.substeps);
                } else {
                    tr.xi.row(k).segment(i * m, m) =
                        noise[static_cast<std::size_t>(i)].value().transpose();
                }
                for (int q = 1; q <= order; ++q)
                    tr.theta_norm(k, i * order + q - 1) =
                        controllers[static_cast<std::size_t>(i)].weight_norm(q);
            }
            complete_rows = k + 1;
        }
    } catch (const DivergenceError& ex) {
        tr.diverged = true;
        tr.divergence_reason = ex.what();
        truncate(tr, complete_rows);
    }
    return tr;
}

SimTrace run(const SimConfig& cfg) {
    const Prepared prep = prepare(cfg);
    return run(cfg, prep, seeds_for_run(cfg, 0));
}

EnsembleResult run_ensemble(const SimConfig& cfg, int runs) {
    if (runs < 1) throw ValidationError("run_ensemble: runs must be >= 1");
    const Prepared prep = prepare(cfg);

    EnsembleResult result;
    result.traces.resize(static_cast<std::size_t>(runs));

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(runs));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int k = next.fetch_add(1); k < runs && !failed.load(); k = next.fetch_add(1)) {
                try {
                    result.traces[static_cast<std::size_t>(k)] =
                        run(cfg, prep, seeds_for_run(cfg, k));
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);

    for (const SimTrace& t : result.traces)
        if (t.diverged) ++result.diverged_count;
    return result;
}

} // namespace imc
