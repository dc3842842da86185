#include "doctest.h"

#include "imc/linalg.hpp"
#include "imc/rng.hpp"

#include <Eigen/Eigenvalues>

using namespace imc;

namespace {

Eigen::MatrixXd random_symmetric(int n, Rng& rng, double scale = 1.0) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = scale * rng.uniform(-1.0, 1.0);
    return 0.5 * (m + m.transpose()).eval();
}

} // namespace

TEST_CASE("jacobi eigenvalues match an independent dense solver") {
    Rng rng(11);
    for (int n : {1, 2, 3, 5, 8, 12}) {
        for (int rep = 0; rep < 5; ++rep) {
            const Eigen::MatrixXd m = random_symmetric(n, rng, 10.0);
            const auto sys = linalg::jacobi_eigen(m);

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m);
            REQUIRE(ref.info() == Eigen::Success);
            for (int k = 0; k < n; ++k)
                CHECK(sys.values[k] == doctest::Approx(ref.eigenvalues()[k]).epsilon(1e-9));

            // Each returned pair must satisfy the eigen equation.
            for (int k = 0; k < n; ++k) {
                const Eigen::VectorXd r = m * sys.vectors.col(k) - sys.values[k] * sys.vectors.col(k);
                CHECK(r.norm() <= 1e-8 * std::max(1.0, m.norm()));
            }
        }
    }
}

TEST_CASE("jacobi rejects non-symmetric input") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS(linalg::jacobi_eigen(m));
}

TEST_CASE("lyapunov solve closes the equation") {
    Rng rng(7);
    for (int n : {1, 2, 4, 6}) {
        for (int rep = 0; rep < 4; ++rep) {
            // A = M - c I with c above the spectral radius keeps A Hurwitz.
            Eigen::MatrixXd a(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
            a -= (static_cast<double>(n) + 1.0) * Eigen::MatrixXd::Identity(n, n);

            Eigen::MatrixXd q = random_symmetric(n, rng);
            q = (q * q.transpose()).eval(); // PSD

            const Eigen::MatrixXd x = linalg::solve_lyapunov(a, q);
            CHECK(linalg::is_symmetric(x, 1e-10));
            const Eigen::MatrixXd res = a.transpose() * x + x * a + q;
            CHECK(res.norm() <= 1e-9 * std::max(1.0, q.norm()));
        }
    }
}

TEST_CASE("lyapunov solve rejects a singular operator") {
    // A = 0 makes A^T X + X A = -Q unsolvable for Q != 0.
    const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS(linalg::solve_lyapunov(a, q));
}
