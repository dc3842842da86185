#include "imc/analysis.hpp"

#include "imc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imc {

EnvelopeParams envelope_params(double ve_t0, double lambda, double t_max,
                               const DesignOutput& design) {
    EnvelopeParams p;
    p.lambda = lambda;
    p.t_max = t_max;

    const double cb_da = design.c_beta / design.delta_alpha;
    const double cb_db = design.c_beta / design.delta_beta;
    const double grow = std::exp(design.delta_beta * t_max);
    p.kappa_const = (cb_db + cb_da) * grow - cb_db;

    // 1 - e^Lambda < 0 for feasible schedules; the ratio term is negative in
    // pi and positive in eps, exactly as in the recursion's closed form.
    const double ratio = p.kappa_const / (1.0 - std::exp(lambda));
    p.pi1 = ve_t0 * std::exp(-lambda) + ratio;
    p.eps1 = -ratio + p.kappa_const + cb_da;
    p.pi2 = grow * p.pi1;
    p.eps2 = grow * p.eps1 + p.kappa_const;
    p.pi_star = std::max(p.pi1, p.pi2);
    p.eps_star = std::max(p.eps1, p.eps2);
    return p;
}

namespace {

double sample_at(const Eigen::VectorXd& time, const Eigen::VectorXd& value, double t) {
    // Linear interpolation on the uniform grid; exact when t is a grid point.
    const Eigen::Index n = time.size();
    if (n == 1 || t <= time[0]) return value[0];
    if (t >= time[n - 1]) return value[n - 1];
    const double dt = time[1] - time[0];
    const auto k = static_cast<Eigen::Index>(std::floor((t - time[0]) / dt));
    const Eigen::Index k1 = std::min(k + 1, n - 1);
    const double w = (t - time[k]) / dt;
    return (1.0 - w) * value[k] + w * value[k1];
}

} // namespace

EnvelopeReport check_envelopes(const Eigen::VectorXd& time, const Eigen::VectorXd& v_e,
                               const ModeSchedule& schedule, const DesignOutput& design,
                               double rel_tol) {
    if (time.size() != v_e.size() || time.size() == 0)
        throw ValidationError("check_envelopes: time and V_e must have equal nonzero length");

    const ScheduleCertificate cert = certify(schedule, design);
    EnvelopeReport report;
    report.rel_tol = rel_tol;
    report.params = envelope_params(v_e[0], cert.lambda, schedule.t_max(), design);
    report.worst_margin = std::numeric_limits<double>::infinity();

    const double da = design.delta_alpha;
    const double db = design.delta_beta;
    const double cb = design.c_beta;
    constexpr double kAbsSlack = 1e-9;

    const auto& periods = schedule.periods();
    std::size_t pk = 0;
    for (Eigen::Index k = 0; k < time.size(); ++k) {
        const double t = time[k];
        if (t >= schedule.end_time()) break;
        while (pk + 1 < periods.size() && t >= periods[pk].tau_next) ++pk;
        const Period& p = periods[pk];

        double bound;
        if (t < p.tau_off) {
            const double ve0 = sample_at(time, v_e, p.tau_on);
            const double d = t - p.tau_on;
            bound = ve0 * std::exp(-da * d) + (cb / da) * (1.0 - std::exp(-da * d));
            if (v_e[k] > bound * (1.0 + rel_tol) + kAbsSlack) ++report.violations_on;
        } else {
            const double ve0 = sample_at(time, v_e, p.tau_off);
            const double d = t - p.tau_off;
            bound = ve0 * std::exp(db * d) + (cb / db) * (std::exp(db * d) - 1.0);
            if (v_e[k] > bound * (1.0 + rel_tol) + kAbsSlack) ++report.violations_off;
        }
        report.worst_margin =
            std::min(report.worst_margin, bound * (1.0 + rel_tol) + kAbsSlack - v_e[k]);

        if (cert.feasible) {
            const double global = report.params.pi_star *
                                      std::exp(-report.params.lambda / report.params.t_max * t) +
                                  report.params.eps_star;
            if (v_e[k] > global * (1.0 + rel_tol) + kAbsSlack) ++report.violations_global;
        }
        ++report.samples;
    }
    return report;
}

EnvelopeReport check_envelopes(const SimTrace& trace, const DesignOutput& design,
                               double rel_tol) {
    return check_envelopes(trace.time, trace.V_e, trace.schedule(), design, rel_tol);
}

RunStats reduce_run(const SimTrace& trace, double tail_start) {
    RunStats stats;
    stats.diverged = trace.diverged;
    const int n_agents = trace.n_agents;
    const int order = trace.order;
    stats.agent_mean_tail.assign(static_cast<std::size_t>(n_agents), 0.0);
    stats.agent_max_tail.assign(static_cast<std::size_t>(n_agents), 0.0);

    if (trace.rows() == 0) {
        stats.diverged = true;
        return stats;
    }

    stats.max_weight_norm = trace.theta_norm.maxCoeff();

    Eigen::Index tail_count = 0;
    double tail_sum = 0.0;
    std::vector<double> agent_sums(static_cast<std::size_t>(n_agents), 0.0);
    for (Eigen::Index k = 0; k < trace.rows(); ++k) {
        if (trace.time[k] < tail_start) continue;
        double worst = 0.0;
        for (int i = 0; i < n_agents; ++i) {
            const double err = std::abs(trace.x(k, i * order) - trace.z_r[k]);
            worst = std::max(worst, err);
            agent_sums[static_cast<std::size_t>(i)] += err;
            stats.agent_max_tail[static_cast<std::size_t>(i)] =
                std::max(stats.agent_max_tail[static_cast<std::size_t>(i)], err);
        }
        stats.sup_tail_error = std::max(stats.sup_tail_error, worst);
        tail_sum += worst;
        ++tail_count;
    }
    if (tail_count > 0) {
        stats.mean_tail_error = tail_sum / static_cast<double>(tail_count);
        for (int i = 0; i < n_agents; ++i)
            stats.agent_mean_tail[static_cast<std::size_t>(i)] =
                agent_sums[static_cast<std::size_t>(i)] / static_cast<double>(tail_count);
    } else {
        // Divergence before the tail window: report the worst error seen.
        stats.diverged = true;
        stats.sup_tail_error = std::numeric_limits<double>::infinity();
        stats.mean_tail_error = std::numeric_limits<double>::infinity();
    }
    return stats;
}

StabilityReport certify_nsps(const EnsembleResult& ensemble, double l0, const BandFn& band,
                             const ControllerParams& controller, double tail_start) {
    const auto runs = static_cast<int>(ensemble.traces.size());
    if (runs < 20) throw ValidationError("certify_nsps: ensemble size must be >= 20");
    if (l0 <= 0.0 || l0 >= 1.0) throw ValidationError("certify_nsps: l0 must lie in (0, 1)");

    // Reference grid: the longest (least truncated) trace.
    const SimTrace* grid = nullptr;
    for (const auto& t : ensemble.traces)
        if (!grid || t.rows() > grid->rows()) grid = &t;
    if (!grid || grid->rows() == 0)
        throw ValidationError("certify_nsps: ensemble contains no usable trace");

    const int n_agents = grid->n_agents;
    const int order = grid->order;

    StabilityReport report;
    report.l0 = l0;
    report.l_a = controller.l_a(order);
    report.c_gamma = controller.c_gamma(order);
    report.time = grid->time;
    report.fraction.setZero(grid->rows());
    report.min_fraction = 1.0;

    for (Eigen::Index k = 0; k < grid->rows(); ++k) {
        const double t = grid->time[k];
        const double b = band(t);
        int inside = 0;
        for (const auto& tr : ensemble.traces) {
            if (k >= tr.rows()) continue; // diverged before t: outside
            double worst = 0.0;
            for (int i = 0; i < n_agents; ++i)
                worst = std::max(worst, std::abs(tr.x(k, i * order) - tr.z_r[k]));
            if (worst <= b) ++inside;
        }
        report.fraction[k] = static_cast<double>(inside) / static_cast<double>(runs);
        report.min_fraction = std::min(report.min_fraction, report.fraction[k]);
    }
    report.pass = report.min_fraction >= 1.0 - l0;

    // Empirical xi-star per agent: sup over time of the ensemble mean ||xi||^2.
    report.xi_star.assign(static_cast<std::size_t>(n_agents), 0.0);
    const int m = grid->noise_dim;
    for (int i = 0; i < n_agents; ++i) {
        double sup = 0.0;
        for (Eigen::Index k = 0; k < grid->rows(); ++k) {
            double acc = 0.0;
            int count = 0;
            for (const auto& tr : ensemble.traces) {
                if (k >= tr.rows()) continue;
                acc += tr.xi.row(k).segment(i * m, m).squaredNorm();
                ++count;
            }
            if (count > 0) sup = std::max(sup, acc / static_cast<double>(count));
        }
        report.xi_star[static_cast<std::size_t>(i)] = sup;
        report.varpi_partial.push_back(report.l_a * sup);
    }

    report.agent_mean_tail.assign(static_cast<std::size_t>(n_agents), 0.0);
    report.agent_max_tail.assign(static_cast<std::size_t>(n_agents), 0.0);
    report.eps_v_estimate.assign(static_cast<std::size_t>(n_agents), 0.0);
    for (const auto& tr : ensemble.traces) {
        const RunStats rs = reduce_run(tr, tail_start);
        for (int i = 0; i < n_agents; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            report.agent_mean_tail[idx] += rs.agent_mean_tail[idx] / runs;
            report.agent_max_tail[idx] += rs.agent_max_tail[idx] / runs;
            report.eps_v_estimate[idx] = std::max(report.eps_v_estimate[idx],
                                                  rs.agent_mean_tail[idx]);
        }
    }
    return report;
}

ConsensusMetrics consensus_metrics(const EnsembleResult& ensemble) {
    if (ensemble.traces.empty()) throw ValidationError("consensus_metrics: empty ensemble");

    Eigen::Index max_rows = 0;
    const SimTrace* grid = nullptr;
    for (const auto& t : ensemble.traces)
        if (t.rows() > max_rows) {
            max_rows = t.rows();
            grid = &t;
        }
    if (!grid || grid->rows() < 4)
        throw ValidationError("consensus_metrics: horizon too short for a tail window");

    const double horizon = grid->time[grid->rows() - 1];
    const double tail_start = 0.75 * horizon;
    const int n_agents = grid->n_agents;

    ConsensusMetrics metrics;
    metrics.agent_mean.assign(static_cast<std::size_t>(n_agents), 0.0);
    metrics.agent_max.assign(static_cast<std::size_t>(n_agents), 0.0);
    metrics.eps_v_estimate.assign(static_cast<std::size_t>(n_agents), 0.0);

    const auto runs = static_cast<double>(ensemble.traces.size());
    for (const auto& tr : ensemble.traces) {
        const RunStats rs = reduce_run(tr, tail_start);
        for (int i = 0; i < n_agents; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            metrics.agent_mean[idx] += rs.agent_mean_tail[idx] / runs;
            metrics.agent_max[idx] += rs.agent_max_tail[idx] / runs;
            metrics.eps_v_estimate[idx] =
                std::max(metrics.eps_v_estimate[idx], rs.agent_mean_tail[idx]);
        }
    }
    for (int i = 0; i < n_agents; ++i)
        metrics.overall_mean += metrics.agent_mean[static_cast<std::size_t>(i)] /
                                static_cast<double>(n_agents);
    return metrics;
}

} // namespace imc
