#include "imc/linalg.hpp"

#include "imc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace imc::linalg {

bool is_symmetric(const MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

namespace {

double off_diagonal_norm(const MatrixXd& a) {
    double s = 0.0;
    for (Eigen::Index p = 0; p < a.rows(); ++p)
        for (Eigen::Index q = 0; q < a.cols(); ++q)
            if (p != q) s += a(p, q) * a(p, q);
    return std::sqrt(s);
}

} // namespace

EigenSystem jacobi_eigen(const MatrixXd& sym, double tol, int max_sweeps) {
    if (!is_symmetric(sym, 1e-10 * std::max(1.0, sym.cwiseAbs().maxCoeff())))
        throw ValidationError("jacobi_eigen: matrix is not symmetric");

    const Eigen::Index n = sym.rows();
    MatrixXd a = 0.5 * (sym + sym.transpose()); // exact symmetry for the sweep
    MatrixXd v = MatrixXd::Identity(n, n);
    const double stop = tol * std::max(1.0, a.norm());

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(a) <= stop) break;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

    EigenSystem out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

double min_eigenvalue(const MatrixXd& sym) { return jacobi_eigen(sym).values.minCoeff(); }

double max_eigenvalue(const MatrixXd& sym) { return jacobi_eigen(sym).values.maxCoeff(); }

double spectral_norm_spd(const MatrixXd& sym) { return max_eigenvalue(sym); }

MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& q) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || q.rows() != n || q.cols() != n)
        throw ValidationError("solve_lyapunov: dimension mismatch");

    // vec(A^T X + X A) = (I (x) A^T + A^T (x) I) vec(X)
    MatrixXd k = MatrixXd::Zero(n * n, n * n);
    const MatrixXd at = a.transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
        k.block(i * n, i * n, n, n) += at;
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index l = 0; l < n; ++l) k(i * n + j, l * n + j) += at(i, l);
    }

    VectorXd rhs(n * n);
    for (Eigen::Index col = 0; col < n; ++col) rhs.segment(col * n, n) = -q.col(col);

    Eigen::FullPivLU<MatrixXd> lu(k);
    if (!lu.isInvertible())
        throw ValidationError("solve_lyapunov: singular operator (A not Hurwitz?)");
    const VectorXd x = lu.solve(rhs);

    MatrixXd out(n, n);
    for (Eigen::Index col = 0; col < n; ++col) out.col(col) = x.segment(col * n, n);
    return 0.5 * (out + out.transpose());
}

} // namespace imc::linalg
