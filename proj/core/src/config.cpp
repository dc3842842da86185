#include "imc/config.hpp"

#include "imc/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace imc {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& section,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object())
        throw ValidationError("config: section '" + section + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key))
            throw ValidationError("config: unknown key '" + section + "." + key + "'");
    }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError("config: bad value for '" + key + "': " + e.what());
    }
}

void apply_override(json& root, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("override must look like section.key=value, got '" + spec + "'");
    const std::string path = spec.substr(0, eq);
    const std::string value_text = spec.substr(eq + 1);

    json value;
    try {
        value = json::parse(value_text);
    } catch (const json::exception&) {
        value = value_text; // plain string
    }

    json* node = &root;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ValidationError("override: empty key path");
    try {
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
        (*node)[parts.back()] = value;
    } catch (const json::exception& e) {
        throw ValidationError("override '" + spec + "' does not fit the config structure: " +
                              e.what());
    }
}

ExperimentConfig build(const json& j) {
    require_keys(j, "(top level)",
                 {"system", "graph", "design", "schedule", "noise", "reference", "plant",
                  "controller", "virtual", "sim", "output"});

    ExperimentConfig cfg;
    SimConfig& sim = cfg.sim;

    const json system = j.value("system", json::object());
    require_keys(system, "system", {"order", "n_followers"});
    sim.chain.order = get_or(system, "order", 2);
    const int n_followers = get_or(system, "n_followers", 4);

    if (j.contains("graph")) {
        const json& g = j.at("graph");
        require_keys(g, "graph", {"edges", "pinning"});
        std::vector<std::tuple<int, int, double>> edges;
        for (const auto& e : g.value("edges", json::array())) {
            if (!e.is_array() || e.size() != 3)
                throw ValidationError("config: graph.edges entries must be [i, j, weight]");
            edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>());
        }
        if (!g.contains("pinning"))
            throw ValidationError("config: graph.pinning is required when graph is given");
        const auto pin_list = g.at("pinning").get<std::vector<double>>();
        if (static_cast<int>(pin_list.size()) != n_followers)
            throw ValidationError("config: graph.pinning length must equal n_followers");
        Eigen::VectorXd pinning(n_followers);
        for (int i = 0; i < n_followers; ++i) pinning[i] = pin_list[static_cast<std::size_t>(i)];
        sim.graph = Graph::from_edges(n_followers, edges, std::move(pinning));
    } else if (n_followers != sim.graph.n()) {
        throw ValidationError("config: system.n_followers differs from the default graph; "
                              "provide a graph section");
    }

    const json design = j.value("design", json::object());
    require_keys(design, "design", {"c0", "c1", "c2", "c3", "c_z"});
    sim.design.c0 = get_or(design, "c0", sim.design.c0);
    sim.design.c1 = get_or(design, "c1", sim.design.c1);
    sim.design.c2 = get_or(design, "c2", sim.design.c2);
    sim.design.c3 = get_or(design, "c3", sim.design.c3);
    sim.design.c_z = get_or(design, "c_z", sim.design.c_z);
    sim.design.n_followers = n_followers;

    const json schedule = j.value("schedule", json::object());
    require_keys(schedule, "schedule", {"on_range", "off_fraction", "seed", "snap_dt"});
    if (schedule.contains("on_range")) {
        const auto range = schedule.at("on_range").get<std::vector<double>>();
        if (range.size() != 2)
            throw ValidationError("config: schedule.on_range must be [lo, hi]");
        sim.schedule.on_lo = range[0];
        sim.schedule.on_hi = range[1];
    }
    sim.schedule.off_fraction = get_or(schedule, "off_fraction", sim.schedule.off_fraction);
    sim.schedule.seed = get_or(schedule, "seed", sim.schedule.seed);
    sim.schedule.snap_dt = get_or(schedule, "snap_dt", sim.schedule.snap_dt);

    const json noise = j.value("noise", json::object());
    require_keys(noise, "noise", {"dim", "power", "correlation_time", "time_constant", "seeds"});
    sim.noise.dim = get_or(noise, "dim", sim.noise.dim);
    sim.noise.power = get_or(noise, "power", sim.noise.power);
    sim.noise.correlation_time = get_or(noise, "correlation_time", sim.noise.correlation_time);
    sim.noise.time_constant = get_or(noise, "time_constant", sim.noise.time_constant);
    if (noise.contains("seeds"))
        sim.noise_seeds = noise.at("seeds").get<std::vector<std::uint64_t>>();

    if (j.contains("reference")) {
        const json& ref = j.at("reference");
        require_keys(ref, "reference", {"kind", "amplitude", "omega", "phase", "value"});
        const std::string kind = get_or<std::string>(ref, "kind", "sine");
        if (kind == "sine") {
            sim.reference = ReferenceSignal::sine(get_or(ref, "amplitude", 1.0),
                                                  get_or(ref, "omega", 0.5), sim.design.c_z,
                                                  get_or(ref, "phase", 0.0));
        } else if (kind == "constant") {
            sim.reference = ReferenceSignal::constant(get_or(ref, "value", 0.0), sim.design.c_z);
        } else {
            throw ValidationError("config: reference.kind must be 'sine' or 'constant'");
        }
    } else {
        sim.reference = ReferenceSignal::sine(1.0, 0.5, sim.design.c_z);
    }

    const json plant = j.value("plant", json::object());
    require_keys(plant, "plant", {"model", "init_range", "init_seed"});
    sim.plant_model = get_or<std::string>(plant, "model", sim.plant_model);
    if (plant.contains("init_range")) {
        const auto range = plant.at("init_range").get<std::vector<double>>();
        if (range.size() != 2)
            throw ValidationError("config: plant.init_range must be [lo, hi]");
        sim.init_lo = range[0];
        sim.init_hi = range[1];
    }
    sim.init_seed = get_or(plant, "init_seed", sim.init_seed);

    const json controller = j.value("controller", json::object());
    require_keys(controller, "controller",
                 {"kappa", "rho", "sigma", "gamma", "rbf_per_dim", "rbf_range"});
    sim.controller.kappa = get_or(controller, "kappa", sim.controller.kappa);
    sim.controller.rho = get_or(controller, "rho", sim.controller.rho);
    sim.controller.sigma = get_or(controller, "sigma", sim.controller.sigma);
    sim.controller.gamma = get_or(controller, "gamma", sim.controller.gamma);
    sim.controller.rbf_per_dim = get_or(controller, "rbf_per_dim", sim.controller.rbf_per_dim);
    if (controller.contains("rbf_range")) {
        const auto range = controller.at("rbf_range").get<std::vector<double>>();
        if (range.size() != 2)
            throw ValidationError("config: controller.rbf_range must be [lo, hi]");
        sim.controller.rbf_lo = range[0];
        sim.controller.rbf_hi = range[1];
    }

    const json virt = j.value("virtual", json::object());
    require_keys(virt, "virtual", {"eta0"});
    if (virt.contains("eta0")) {
        const json& rows = virt.at("eta0");
        // One row per agent, order entries each.
        sim.eta0.resize(sim.chain.order, n_followers);
        if (static_cast<int>(rows.size()) != n_followers)
            throw ValidationError("config: virtual.eta0 needs one row per agent");
        for (int i = 0; i < n_followers; ++i) {
            const auto row = rows.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
            if (static_cast<int>(row.size()) != sim.chain.order)
                throw ValidationError("config: virtual.eta0 rows need `order` entries");
            for (int q = 0; q < sim.chain.order; ++q)
                sim.eta0(q, i) = row[static_cast<std::size_t>(q)];
        }
    }

    const json sim_j = j.value("sim", json::object());
    require_keys(sim_j, "sim", {"dt", "horizon", "substeps", "master_seed"});
    sim.dt = get_or(sim_j, "dt", sim.dt);
    sim.horizon = get_or(sim_j, "horizon", sim.horizon);
    sim.substeps = get_or(sim_j, "substeps", sim.substeps);
    sim.master_seed = get_or(sim_j, "master_seed", sim.master_seed);

    const json output = j.value("output", json::object());
    require_keys(output, "output", {"dir", "write_traces"});
    cfg.out_dir = get_or<std::string>(output, "dir", cfg.out_dir.string());
    cfg.write_traces = get_or(output, "write_traces", cfg.write_traces);

    sim.validate();
    return cfg;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::vector<std::string>& overrides) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }
    for (const auto& o : overrides) apply_override(j, o);
    return build(j);
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file,
                                        const std::vector<std::string>& overrides) {
    std::ifstream in(file);
    if (!in) throw ValidationError("config: cannot open " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str(), overrides);
}

} // namespace imc
