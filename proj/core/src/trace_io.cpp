#include "imc/trace_io.hpp"

#include "imc/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace imc {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return {};
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

} // namespace

void write_trace_csv(const std::filesystem::path& path, const SimTrace& trace) {
    std::ofstream out = open_out(path);

    const int n = trace.order;
    const int n_agents = trace.n_agents;
    const int m = trace.noise_dim;

    out << "time,mode,z_r,V_e";
    for (int i = 1; i <= n_agents; ++i) {
        for (int q = 1; q <= n; ++q) out << ",eta" << i << "_" << q;
        for (int q = 1; q <= n; ++q) out << ",zeta" << i << "_" << q;
        for (int q = 1; q <= n; ++q) out << ",x" << i << "_" << q;
        for (int q = 1; q <= n; ++q) out << ",e" << i << "_" << q;
        for (int q = 1; q < n; ++q) out << ",alpha" << i << "_" << q;
        out << ",u" << i;
        for (int j = 1; j <= m; ++j) out << ",xi" << i << "_" << j;
        for (int q = 1; q <= n; ++q) out << ",thetanorm" << i << "_" << q;
        out << ",V" << i;
    }
    out << "\n";

    for (Eigen::Index k = 0; k < trace.rows(); ++k) {
        out << fmt(trace.time[k]) << ',' << trace.mode[k] << ',' << fmt(trace.z_r[k]) << ','
            << fmt(trace.V_e[k]);
        for (int i = 0; i < n_agents; ++i) {
            for (int q = 0; q < n; ++q) out << ',' << fmt(trace.eta(k, i * n + q));
            for (int q = 0; q < n; ++q) out << ',' << fmt(trace.zeta(k, i * n + q));
            for (int q = 0; q < n; ++q) out << ',' << fmt(trace.x(k, i * n + q));
            for (int q = 0; q < n; ++q) out << ',' << fmt(trace.e(k, i * n + q));
            for (int q = 0; q < n - 1; ++q) out << ',' << fmt(trace.alpha(k, i * (n - 1) + q));
            out << ',' << fmt(trace.u(k, i));
            for (int j = 0; j < m; ++j) out << ',' << fmt(trace.xi(k, i * m + j));
            for (int q = 0; q < n; ++q) out << ',' << fmt(trace.theta_norm(k, i * n + q));
            out << ',' << fmt(trace.V_agent(k, i));
        }
        out << "\n";
    }
    if (trace.diverged)
        out << "# diverged: " << trace.divergence_reason << "\n";
}

SimTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("trace csv: empty file");
    const std::vector<std::string> header = split(line);

    int n = 0, n_agents = 0, m = 0;
    for (const auto& h : header) {
        if (h.rfind("eta", 0) == 0) {
            const auto us = h.find('_');
            n_agents = std::max(n_agents, std::stoi(h.substr(3, us - 3)));
            n = std::max(n, std::stoi(h.substr(us + 1)));
        } else if (h.rfind("xi", 0) == 0 && h.find('_') != std::string::npos) {
            m = std::max(m, std::stoi(h.substr(h.find('_') + 1)));
        }
    }
    if (n == 0 || n_agents == 0)
        throw ValidationError("trace csv: header does not look like a trace file");

    std::vector<std::vector<double>> data;
    bool diverged = false;
    std::string reason;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# diverged:", 0) == 0) {
                diverged = true;
                reason = line.substr(12);
            }
            continue;
        }
        const auto items = split(line);
        if (items.size() != header.size())
            throw ValidationError("trace csv: row width mismatch");
        std::vector<double> row;
        row.reserve(items.size());
        for (const auto& s : items) row.push_back(std::stod(s));
        data.push_back(std::move(row));
    }

    SimTrace tr;
    tr.order = n;
    tr.n_agents = n_agents;
    tr.noise_dim = m;
    tr.diverged = diverged;
    tr.divergence_reason = reason;

    const auto rows = static_cast<Eigen::Index>(data.size());
    tr.time.resize(rows);
    tr.mode.resize(rows);
    tr.z_r.resize(rows);
    tr.V_e.resize(rows);
    tr.eta.resize(rows, n_agents * n);
    tr.zeta.resize(rows, n_agents * n);
    tr.x.resize(rows, n_agents * n);
    tr.e.resize(rows, n_agents * n);
    tr.alpha.resize(rows, n_agents * (n - 1));
    tr.u.resize(rows, n_agents);
    tr.xi.resize(rows, n_agents * m);
    tr.theta_norm.resize(rows, n_agents * n);
    tr.V_agent.resize(rows, n_agents);

    for (Eigen::Index k = 0; k < rows; ++k) {
        const auto& row = data[static_cast<std::size_t>(k)];
        std::size_t c = 0;
        tr.time[k] = row[c++];
        tr.mode[k] = static_cast<int>(row[c++]);
        tr.z_r[k] = row[c++];
        tr.V_e[k] = row[c++];
        for (int i = 0; i < n_agents; ++i) {
            for (int q = 0; q < n; ++q) tr.eta(k, i * n + q) = row[c++];
            for (int q = 0; q < n; ++q) tr.zeta(k, i * n + q) = row[c++];
            for (int q = 0; q < n; ++q) tr.x(k, i * n + q) = row[c++];
            for (int q = 0; q < n; ++q) tr.e(k, i * n + q) = row[c++];
            for (int q = 0; q < n - 1; ++q) tr.alpha(k, i * (n - 1) + q) = row[c++];
            tr.u(k, i) = row[c++];
            for (int j = 0; j < m; ++j) tr.xi(k, i * m + j) = row[c++];
            for (int q = 0; q < n; ++q) tr.theta_norm(k, i * n + q) = row[c++];
            tr.V_agent(k, i) = row[c++];
        }
    }
    if (rows >= 2) tr.dt = tr.time[1] - tr.time[0];
    return tr;
}

void write_schedule_csv(const std::filesystem::path& path, const ModeSchedule& schedule,
                        const ScheduleCertificate& cert) {
    std::ofstream out = open_out(path);
    out << "kappa,tau_on,tau_off,tau_next,on_duration,off_duration,total,lambda_k,feasible\n";
    const auto& periods = schedule.periods();
    for (std::size_t k = 0; k < periods.size(); ++k) {
        const Period& p = periods[k];
        const PeriodCertificate& pc = cert.periods[k];
        out << k << ',' << fmt(p.tau_on) << ',' << fmt(p.tau_off) << ',' << fmt(p.tau_next) << ','
            << fmt(p.on_duration()) << ',' << fmt(p.off_duration()) << ',' << fmt(p.total()) << ','
            << fmt(pc.lambda_k) << ',' << (pc.feasible ? 1 : 0) << "\n";
    }
}

ModeSchedule read_schedule_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("schedule csv: empty file");
    std::vector<Period> periods;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto items = split(line);
        if (items.size() < 4) throw ValidationError("schedule csv: malformed row");
        Period p;
        p.tau_on = std::stod(items[1]);
        p.tau_off = std::stod(items[2]);
        p.tau_next = std::stod(items[3]);
        periods.push_back(p);
    }
    return ModeSchedule(std::move(periods));
}

void write_design_json(const std::filesystem::path& path, const DesignOutput& design,
                       const RiccatiSolution& solution, double lambda_min,
                       const DesignInputs& inputs) {
    json j;
    j["P"] = matrix_to_json(design.P);
    j["K"] = json::array();
    for (Eigen::Index i = 0; i < design.K.size(); ++i) j["K"].push_back(design.K[i]);
    j["p_norm"] = design.p_norm;
    j["c_alpha1"] = design.c_alpha1;
    j["delta_alpha"] = design.delta_alpha;
    j["delta_beta"] = design.delta_beta;
    j["c_beta"] = design.c_beta;
    j["max_off_ratio"] = design.max_off_ratio;
    j["lambda_min"] = lambda_min;
    j["margin"] = solution.margin;
    j["residual_riccati"] = matrix_to_json(solution.residual_riccati);
    j["residual_decay"] = matrix_to_json(solution.residual_decay);
    j["inputs"] = {{"c0", inputs.c0},   {"c1", inputs.c1},          {"c2", inputs.c2},
                   {"c3", inputs.c3},   {"c_z", inputs.c_z},        {"n_followers", inputs.n_followers}};

    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

DesignRecord read_design_json(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    json j;
    in >> j;

    DesignRecord rec;
    rec.design.P = matrix_from_json(j.at("P"));
    const auto& k = j.at("K");
    rec.design.K.resize(static_cast<Eigen::Index>(k.size()));
    for (Eigen::Index i = 0; i < rec.design.K.size(); ++i)
        rec.design.K[i] = k.at(static_cast<std::size_t>(i)).get<double>();
    rec.design.p_norm = j.at("p_norm").get<double>();
    rec.design.c_alpha1 = j.at("c_alpha1").get<double>();
    rec.design.delta_alpha = j.at("delta_alpha").get<double>();
    rec.design.delta_beta = j.at("delta_beta").get<double>();
    rec.design.c_beta = j.at("c_beta").get<double>();
    rec.design.max_off_ratio = j.at("max_off_ratio").get<double>();
    rec.lambda_min = j.at("lambda_min").get<double>();
    const auto& in_j = j.at("inputs");
    rec.inputs.c0 = in_j.at("c0").get<int>();
    rec.inputs.c1 = in_j.at("c1").get<double>();
    rec.inputs.c2 = in_j.at("c2").get<double>();
    rec.inputs.c3 = in_j.at("c3").get<double>();
    rec.inputs.c_z = in_j.at("c_z").get<double>();
    rec.inputs.n_followers = in_j.at("n_followers").get<int>();
    return rec;
}

void write_envelope_report(const std::filesystem::path& csv_path, const EnvelopeReport& report) {
    std::ofstream out = open_out(csv_path);
    out << "metric,value\n";
    out << "samples," << report.samples << "\n";
    out << "violations_on," << report.violations_on << "\n";
    out << "violations_off," << report.violations_off << "\n";
    out << "violations_global," << report.violations_global << "\n";
    out << "worst_margin," << fmt(report.worst_margin) << "\n";
    out << "rel_tol," << fmt(report.rel_tol) << "\n";
    out << "kappa_const," << fmt(report.params.kappa_const) << "\n";
    out << "pi1," << fmt(report.params.pi1) << "\n";
    out << "pi2," << fmt(report.params.pi2) << "\n";
    out << "eps1," << fmt(report.params.eps1) << "\n";
    out << "eps2," << fmt(report.params.eps2) << "\n";
    out << "pi_star," << fmt(report.params.pi_star) << "\n";
    out << "eps_star," << fmt(report.params.eps_star) << "\n";
    out << "lambda," << fmt(report.params.lambda) << "\n";
    out << "t_max," << fmt(report.params.t_max) << "\n";
}

void write_stability_report(const std::filesystem::path& csv_path,
                            const StabilityReport& report) {
    std::ofstream out = open_out(csv_path);
    out << "# pass=" << (report.pass ? 1 : 0) << " l0=" << fmt(report.l0)
        << " min_fraction=" << fmt(report.min_fraction) << " l_a=" << fmt(report.l_a)
        << " c_gamma=" << fmt(report.c_gamma) << "\n";
    out << "# per-agent xi_star:";
    for (double v : report.xi_star) out << ' ' << fmt(v);
    out << "\n# per-agent varpi_partial (l_a * xi_star):";
    for (double v : report.varpi_partial) out << ' ' << fmt(v);
    out << "\n# per-agent eps_v_estimate:";
    for (double v : report.eps_v_estimate) out << ' ' << fmt(v);
    out << "\ntime,fraction\n";
    for (Eigen::Index k = 0; k < report.time.size(); ++k)
        out << fmt(report.time[k]) << ',' << fmt(report.fraction[k]) << "\n";
}

void write_ensemble_summary(const std::filesystem::path& csv_path,
                            const EnsembleResult& ensemble, double tail_start) {
    std::ofstream out = open_out(csv_path);
    out << "run,diverged,sup_tail_error,mean_tail_error,max_weight_norm";
    int n_agents = 0;
    if (!ensemble.traces.empty()) n_agents = ensemble.traces.front().n_agents;
    for (int i = 1; i <= n_agents; ++i) out << ",mean_tail_" << i << ",max_tail_" << i;
    out << "\n";
    for (std::size_t r = 0; r < ensemble.traces.size(); ++r) {
        const RunStats rs = reduce_run(ensemble.traces[r], tail_start);
        out << r << ',' << (rs.diverged ? 1 : 0) << ',' << fmt(rs.sup_tail_error) << ','
            << fmt(rs.mean_tail_error) << ',' << fmt(rs.max_weight_norm);
        for (int i = 0; i < n_agents; ++i)
            out << ',' << fmt(rs.agent_mean_tail[static_cast<std::size_t>(i)]) << ','
                << fmt(rs.agent_max_tail[static_cast<std::size_t>(i)]);
        out << "\n";
    }
}

} // namespace imc
