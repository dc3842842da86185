#pragma once

#include "imc/controller.hpp"
#include "imc/design.hpp"
#include "imc/graph.hpp"
#include "imc/noise.hpp"
#include "imc/plant.hpp"
#include "imc/refcase.hpp"
#include "imc/reference_signal.hpp"
#include "imc/schedule.hpp"
#include "imc/virtual_layer.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace imc {

/// Complete closed-loop experiment description. Default-constructed, it is
/// the reference experiment: 4 second-order agents on the fixture ring,
/// sinusoidal leader, 20 s at 1 ms.
struct SimConfig {
    ChainSpec chain{refcase::order};
    Graph graph = refcase::fixture_graph();
    DesignInputs design{};     // defaults are the reference constants
    ScheduleParams schedule{}; // snap_dt == 0 snaps to the simulation grid
    NoiseParams noise{};
    std::vector<std::uint64_t> noise_seeds{23341, 34243, 23343, 34241};
    ReferenceSignal reference = ReferenceSignal::sine(1.0, 0.5, 1.0);
    std::string plant_model = "reference";
    double init_lo = -2.0; // x_{i,1}(0) drawn uniformly from [init_lo, init_hi]
    double init_hi = 2.0;
    std::uint64_t init_seed = 52721;
    ControllerParams controller{};
    Eigen::MatrixXd eta0; // order x N; empty means zeros
    double dt = 1e-3;
    double horizon = 20.0;
    int substeps = 1; // integration substeps per sample period, inputs held
    std::uint64_t master_seed = 1;

    void validate() const;
};

/// Time-indexed log of one run. Columns are stored agent-major:
/// block i*order + (q-1) belongs to agent i (0-based), stage q.
struct SimTrace {
    int order = 0;
    int n_agents = 0;
    int noise_dim = 0;
    double dt = 0.0;

    Eigen::VectorXd time;
    Eigen::VectorXi mode; // 1 = ON, 0 = OFF
    Eigen::VectorXd z_r;
    Eigen::VectorXd V_e;
    Eigen::MatrixXd eta;        // rows x (N*order)
    Eigen::MatrixXd zeta;       // rows x (N*order)
    Eigen::MatrixXd x;          // rows x (N*order)
    Eigen::MatrixXd e;          // rows x (N*order)
    Eigen::MatrixXd alpha;      // rows x (N*(order-1))
    Eigen::MatrixXd u;          // rows x N
    Eigen::MatrixXd xi;         // rows x (N*noise_dim)
    Eigen::MatrixXd theta_norm; // rows x (N*order)
    Eigen::MatrixXd V_agent;    // rows x N, the error-energy part of V_i

    std::vector<Period> schedule_periods;

    bool diverged = false;
    std::string divergence_reason;

    [[nodiscard]] Eigen::Index rows() const { return time.size(); }
    [[nodiscard]] ModeSchedule schedule() const { return ModeSchedule(schedule_periods); }
};

/// Immutable pre-run artifacts shared across an ensemble.
struct Prepared {
    double lambda_min = 0.0;
    RiccatiSolution riccati;
    DesignOutput design;
};

/// Validates the config, runs the gain synthesis (throws InfeasibleError when
/// the margin sweep or the pinning condition fails) and probes the models.
Prepared prepare(const SimConfig& cfg);

/// Seed bundle for one run. Run 0 uses the seeds written in the config;
/// run k >= 1 derives a fresh bundle from the master seed.
struct RunSeeds {
    std::vector<std::uint64_t> noise;
    std::uint64_t init = 0;
    std::uint64_t schedule = 0;
};
RunSeeds seeds_for_run(const SimConfig& cfg, int run_index);

/// One deterministic closed-loop run.
SimTrace run(const SimConfig& cfg);
SimTrace run(const SimConfig& cfg, const Prepared& prep, const RunSeeds& seeds);

struct EnsembleResult {
    std::vector<SimTrace> traces;
    int diverged_count = 0;
};

/// Independent runs with per-run seed bundles, executed concurrently.
/// Divergence in one run truncates that trace and the remaining runs
/// continue.
EnsembleResult run_ensemble(const SimConfig& cfg, int runs);

} // namespace imc
