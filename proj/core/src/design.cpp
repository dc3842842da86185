#include "imc/design.hpp"

#include "imc/errors.hpp"
#include "imc/linalg.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace imc {

Eigen::MatrixXd ChainSpec::A() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(order, order);
    for (int i = 0; i + 1 < order; ++i) a(i, i + 1) = 1.0;
    return a;
}

Eigen::VectorXd ChainSpec::B() const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(order);
    b[order - 1] = 1.0;
    return b;
}

ChainSpec ChainSpec::of_order(int n) {
    if (n < 1) throw ValidationError("chain order must be >= 1");
    return ChainSpec{n};
}

void DesignInputs::validate() const {
    if (c0 < 1) throw ValidationError("design: c0 must be a positive integer");
    if (c1 <= 0.0 || c2 <= 0.0 || c3 <= 0.0 || c_z <= 0.0)
        throw ValidationError("design: c1, c2, c3, c_z must be strictly positive");
    if (n_followers < 1) throw ValidationError("design: n_followers must be >= 1");
}

namespace {

/// Gain placing all poles of the chain at -pole: the closed-loop
/// characteristic polynomial is (s + pole)^n, so K_j = C(n, j-1) pole^(n-j+1).
Eigen::RowVectorXd binomial_gain(int n, double pole) {
    Eigen::RowVectorXd k(n);
    double binom = 1.0;
    for (int j = 0; j < n; ++j) {
        // C(n, j), iteratively
        if (j > 0) binom = binom * static_cast<double>(n - j + 1) / static_cast<double>(j);
        k[j] = binom * std::pow(pole, n - j);
    }
    return k;
}

/// Newton-Kleinman for A^T P + P A - 2 P B B^T P + c I = 0.
/// Equivalent ARE with R = 1/2, Q = c I; the iteration solves
/// (A - B K)^T P + P (A - B K) + c I + 0.5 K^T K = 0 with K = 2 B^T P.
std::optional<Eigen::MatrixXd> newton_kleinman(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                               double c, const SolveOptions& opts) {
    const Eigen::Index n = a.rows();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

    Eigen::RowVectorXd k = binomial_gain(static_cast<int>(n), opts.pole);
    Eigen::MatrixXd p_prev = Eigen::MatrixXd::Zero(n, n);

    for (int iter = 0; iter < opts.newton_max_iter; ++iter) {
        const Eigen::MatrixXd a_cl = a - b * k;
        const Eigen::MatrixXd q = c * eye + 0.5 * k.transpose() * k;
        Eigen::MatrixXd p;
        try {
            p = linalg::solve_lyapunov(a_cl, q);
        } catch (const Error&) {
            return std::nullopt;
        }
        if (!p.allFinite()) return std::nullopt;
        k = 2.0 * b.transpose() * p;
        const double delta = (p - p_prev).norm();
        p_prev = p;
        if (delta <= opts.newton_tol * std::max(1.0, p.norm())) break;
    }

    // Verify the ARE actually closed.
    const Eigen::MatrixXd res =
        a.transpose() * p_prev + p_prev * a - 2.0 * p_prev * b * b.transpose() * p_prev + c * eye;
    if (res.norm() > 1e-8 * std::max(1.0, c)) return std::nullopt;
    if (linalg::min_eigenvalue(p_prev) <= 0.0) return std::nullopt;
    return p_prev;
}

} // namespace

bool check_inequalities(const Eigen::MatrixXd& P, const ChainSpec& spec, double c1, double c3,
                        double eps, Eigen::MatrixXd* residual_riccati,
                        Eigen::MatrixXd* residual_decay) {
    const Eigen::MatrixXd a = spec.A();
    const Eigen::VectorXd b = spec.B();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(spec.order, spec.order);

    const Eigen::MatrixXd r1 =
        a.transpose() * P + P * a - 2.0 * P * b * b.transpose() * P + c1 * eye;
    const Eigen::MatrixXd r2 = a.transpose() * P + P * a - c3 * P;
    if (residual_riccati) *residual_riccati = r1;
    if (residual_decay) *residual_decay = r2;

    if (!linalg::is_symmetric(P, 1e-9 * std::max(1.0, P.norm()))) return false;
    if (linalg::min_eigenvalue(0.5 * (P + P.transpose())) <= 0.0) return false;
    return linalg::max_eigenvalue(0.5 * (r1 + r1.transpose())) <= eps &&
           linalg::max_eigenvalue(0.5 * (r2 + r2.transpose())) <= eps;
}

RiccatiSolution solve_P(const ChainSpec& spec, double c1, double c3, const SolveOptions& opts) {
    if (c1 <= 0.0 || c3 <= 0.0) throw ValidationError("solve_P: c1 and c3 must be positive");

    const Eigen::MatrixXd a = spec.A();
    const Eigen::VectorXd b = spec.B();

    std::optional<RiccatiSolution> best;
    for (double mu : opts.margins) {
        const auto p = newton_kleinman(a, b, c1 + mu, opts);
        if (!p) continue;

        RiccatiSolution cand;
        cand.P = *p;
        cand.margin = mu;
        // Strict feasibility of the solver's own P, in the original c1.
        const bool ok = check_inequalities(cand.P, spec, c1, c3, 0.0, &cand.residual_riccati,
                                           &cand.residual_decay) &&
                        linalg::max_eigenvalue(cand.residual_riccati) < 0.0 &&
                        linalg::max_eigenvalue(cand.residual_decay) < 0.0;
        if (!ok) continue;

        if (!best || cand.P.trace() < best->P.trace()) best = cand;
    }

    if (!best)
        throw InfeasibleError("design infeasible for (c1=" + std::to_string(c1) +
                              ", c3=" + std::to_string(c3) + "): no margin in sweep passed");
    return *best;
}

Eigen::RowVectorXd make_gain(const Eigen::MatrixXd& P, const ChainSpec& spec, int c0,
                             double lambda_min) {
    if (static_cast<double>(c0) * lambda_min < 1.0)
        throw InfeasibleError("pinning-gain condition violated: c0*lambda_min = " +
                              std::to_string(c0 * lambda_min) + " < 1");
    return static_cast<double>(c0) * spec.B().transpose() * P;
}

DesignOutput rates(const Eigen::MatrixXd& P, const DesignInputs& inputs) {
    inputs.validate();

    DesignOutput out;
    out.P = P;
    out.p_norm = linalg::spectral_norm_spd(0.5 * (P + P.transpose()));
    out.c_alpha1 =
        inputs.c1 - inputs.c_z * static_cast<double>(inputs.n_followers) * out.p_norm / inputs.c2;
    if (out.c_alpha1 <= 0.0)
        throw InfeasibleError("design: c2 too small / P too large (c_alpha1 = " +
                              std::to_string(out.c_alpha1) + " <= 0)");
    out.delta_alpha = out.c_alpha1 / out.p_norm;
    out.delta_beta = inputs.c3 + inputs.c_z * static_cast<double>(inputs.n_followers) / inputs.c2;
    out.c_beta = inputs.c2 * inputs.c_z * out.p_norm;
    out.max_off_ratio = out.delta_alpha / out.delta_beta;

    ChainSpec spec{static_cast<int>(P.rows())};
    out.K = static_cast<double>(inputs.c0) * spec.B().transpose() * P;
    return out;
}

DesignOutput design_chain(const ChainSpec& spec, double lambda_min, const DesignInputs& inputs,
                          const SolveOptions& opts, RiccatiSolution* solution) {
    inputs.validate();
    const RiccatiSolution sol = solve_P(spec, inputs.c1, inputs.c3, opts);
    if (solution) *solution = sol;

    DesignOutput out = rates(sol.P, inputs);
    out.K = make_gain(sol.P, spec, inputs.c0, lambda_min); // enforces the pinning condition
    return out;
}

} // namespace imc
