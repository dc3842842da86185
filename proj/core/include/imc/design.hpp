#pragma once

#include <Eigen/Dense>

#include <vector>

namespace imc {

/// Integrator-chain pair: A has ones on the first superdiagonal, B = e_n.
/// (A, B) is controllable by construction.
struct ChainSpec {
    int order = 2;

    [[nodiscard]] Eigen::MatrixXd A() const;
    [[nodiscard]] Eigen::VectorXd B() const;

    static ChainSpec of_order(int n);
};

struct DesignInputs {
    int c0 = 6;        // positive integer, pinning gain factor
    double c1 = 20.0;  // Riccati-inequality constant
    double c2 = 10.0;  // Young's-inequality split constant
    double c3 = 3.0;   // decay-inequality constant
    double c_z = 1.0;  // leader derivative bound
    int n_followers = 4;

    void validate() const;
};

/// Solution of the coupled matrix inequalities, with the residual matrices
/// kept for inspection:
///   residual_riccati = A^T P + P A - 2 P B B^T P + c1 I
///   residual_decay   = A^T P + P A - c3 P
struct RiccatiSolution {
    Eigen::MatrixXd P;
    Eigen::MatrixXd residual_riccati;
    Eigen::MatrixXd residual_decay;
    double margin = 0.0; // the sweep margin mu that produced P
};

struct SolveOptions {
    std::vector<double> margins{0.1, 0.5, 1.0, 2.0};
    double newton_tol = 1e-13;
    int newton_max_iter = 60;
    double pole = 2.0; // initial stabilizing gain places all poles at -pole
};

/// Solves A^T P + P A - 2 P B B^T P + (c1 + mu) I = 0 by Newton-Kleinman
/// iteration for each margin mu in the sweep, checks the decay inequality a
/// posteriori, and keeps the feasible solution of smallest trace. Both
/// residuals of the returned P are strictly negative definite.
/// Throws InfeasibleError when no margin passes.
RiccatiSolution solve_P(const ChainSpec& spec, double c1, double c3,
                        const SolveOptions& opts = {});

/// Residual check for an externally supplied P: both residual matrices must
/// have eigenvalues <= eps. Optionally emits the residuals.
bool check_inequalities(const Eigen::MatrixXd& P, const ChainSpec& spec, double c1, double c3,
                        double eps, Eigen::MatrixXd* residual_riccati = nullptr,
                        Eigen::MatrixXd* residual_decay = nullptr);

/// K = c0 * B^T * P, guarded by the pinning condition c0 * lambda_min >= 1.
Eigen::RowVectorXd make_gain(const Eigen::MatrixXd& P, const ChainSpec& spec, int c0,
                             double lambda_min);

/// Every constant of the resilience analysis, derived from one P.
/// ||P|| is the spectral norm (largest eigenvalue of the SPD matrix).
struct DesignOutput {
    Eigen::MatrixXd P;
    Eigen::RowVectorXd K;
    double p_norm = 0.0;
    double c_alpha1 = 0.0;      // c1 - c_z N ||P|| / c2, must be > 0
    double delta_alpha = 0.0;   // ON-mode decay rate, c_alpha1 / ||P||
    double delta_beta = 0.0;    // OFF-mode growth rate, c3 + c_z N / c2
    double c_beta = 0.0;        // offset c2 c_z ||P||
    double max_off_ratio = 0.0; // delta_alpha / delta_beta
};

/// Fills every DesignOutput field from P and the design constants.
/// Throws InfeasibleError when c_alpha1 <= 0 (c2 too small / P too large).
DesignOutput rates(const Eigen::MatrixXd& P, const DesignInputs& inputs);

/// Full chain: solve_P -> pinning check -> rates. `lambda_min` is
/// min eig(L+B) of the communication graph.
DesignOutput design_chain(const ChainSpec& spec, double lambda_min, const DesignInputs& inputs,
                          const SolveOptions& opts = {}, RiccatiSolution* solution = nullptr);

} // namespace imc
