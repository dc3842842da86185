#pragma once

#include "imc/engine.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace imc {

/// One experiment = one structured config file plus CLI overrides.
/// Every key is optional; defaults reproduce the reference experiment.
/// Unknown keys are rejected before any computation.
struct ExperimentConfig {
    SimConfig sim;
    std::filesystem::path out_dir = "out";
    int write_traces = 1; // how many ensemble traces to export as CSV

    /// Overrides use dotted paths with JSON-parsed values, e.g.
    ///   sim.horizon=10   schedule.off_fraction=0.95   noise.seeds=[1,2,3,4]
    static ExperimentConfig load(const std::filesystem::path& file,
                                 const std::vector<std::string>& overrides = {});
    static ExperimentConfig from_json_text(const std::string& text,
                                           const std::vector<std::string>& overrides = {});
};

} // namespace imc
