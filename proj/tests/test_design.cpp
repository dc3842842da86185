#include "doctest.h"

#include "imc/design.hpp"
#include "imc/errors.hpp"
#include "imc/linalg.hpp"
#include "imc/refcase.hpp"

#include <cmath>

using namespace imc;

namespace {

// Closed-form eigenvalues of a symmetric 2x2 matrix, used as an independent
// oracle against the Jacobi path.
std::pair<double, double> eig2(const Eigen::Matrix2d& m) {
    const double tr = m.trace();
    const double det = m.determinant();
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    return {0.5 * (tr - disc), 0.5 * (tr + disc)};
}

DesignInputs reference_inputs() {
    DesignInputs in;
    in.c0 = refcase::c0;
    in.c1 = refcase::c1;
    in.c2 = refcase::c2;
    in.c3 = refcase::c3;
    in.c_z = refcase::c_z;
    in.n_followers = refcase::n_followers;
    return in;
}

} // namespace

TEST_CASE("scalar chain has the closed-form solution") {
    const ChainSpec spec = ChainSpec::of_order(1);
    const RiccatiSolution sol = solve_P(spec, 2.0, 1.0);
    // -2 p^2 + (c1 + mu) = 0 with the smallest-trace margin mu = 0.1.
    CHECK(sol.margin == doctest::Approx(0.1));
    CHECK(sol.P(0, 0) == doctest::Approx(std::sqrt(2.1 / 2.0)).epsilon(1e-10));
    CHECK(linalg::max_eigenvalue(sol.residual_riccati) < 0.0);
    CHECK(linalg::max_eigenvalue(sol.residual_decay) < 0.0);
}

TEST_CASE("order-2 solver solution matches the closed-form Riccati root") {
    const ChainSpec spec = ChainSpec::of_order(2);
    const RiccatiSolution sol = solve_P(spec, refcase::c1, refcase::c3);

    // For the chain of order 2: p12 = sqrt(c/2), p22 = sqrt(p12 + c/2),
    // p11 = 2 p12 p22, with c = c1 + margin.
    const double c = refcase::c1 + sol.margin;
    const double p12 = std::sqrt(c / 2.0);
    const double p22 = std::sqrt(p12 + c / 2.0);
    const double p11 = 2.0 * p12 * p22;
    CHECK(sol.P(0, 0) == doctest::Approx(p11).epsilon(1e-9));
    CHECK(sol.P(0, 1) == doctest::Approx(p12).epsilon(1e-9));
    CHECK(sol.P(1, 1) == doctest::Approx(p22).epsilon(1e-9));

    // The solver's own P passes strictly.
    CHECK(linalg::max_eigenvalue(sol.residual_riccati) < 0.0);
    CHECK(linalg::max_eigenvalue(sol.residual_decay) < 0.0);
    CHECK(linalg::min_eigenvalue(sol.P) > 0.0);
    CHECK((sol.P - sol.P.transpose()).norm() <= 1e-12);
}

TEST_CASE("published P passes the residual check at eps = 1e-3") {
    const ChainSpec spec = ChainSpec::of_order(2);
    Eigen::MatrixXd r1, r2;
    CHECK(check_inequalities(refcase::published_P(), spec, refcase::c1, refcase::c3, 1e-3, &r1,
                             &r2));

    // Residual eigenvalues sit in the published rounding window.
    const auto [lo, hi] = eig2(r1);
    CHECK(lo >= -7e-4);
    CHECK(hi <= 3e-4);
    // The decay residual is strictly negative definite.
    const auto [dlo, dhi] = eig2(r2);
    CHECK(dhi < 0.0);
    CHECK(dlo < 0.0);
}

TEST_CASE("infeasible constants are reported") {
    const ChainSpec spec = ChainSpec::of_order(2);
    // c3 this small leaves A^T P + P A - c3 P indefinite for every margin.
    CHECK_THROWS_AS(static_cast<void>(solve_P(spec, 20.0, 0.01)), InfeasibleError);
}

TEST_CASE("gain construction") {
    const ChainSpec spec = ChainSpec::of_order(2);

    SUBCASE("published values") {
        const Eigen::RowVectorXd k =
            make_gain(refcase::published_P(), spec, refcase::c0, refcase::published_lambda_min);
        CHECK(std::abs(k[0] - refcase::published_K()[0]) <= 5e-3);
        CHECK(std::abs(k[1] - refcase::published_K()[1]) <= 5e-3);
    }
    SUBCASE("identity P selects the last row") {
        const Eigen::RowVectorXd k = make_gain(Eigen::MatrixXd::Identity(2, 2), spec, 1, 1.5);
        CHECK(k[0] == 0.0);
        CHECK(k[1] == 1.0);
    }
    SUBCASE("pinning condition enforced") {
        CHECK_THROWS_WITH_AS(
            static_cast<void>(make_gain(refcase::published_P(), spec, 1,
                                        refcase::published_lambda_min)),
            doctest::Contains("pinning-gain condition violated"), InfeasibleError);
        // c0 = 6 passes: 6 * 0.1981 = 1.1886 >= 1.
        CHECK(refcase::c0 * refcase::published_lambda_min >= 1.0);
    }
    SUBCASE("K is homogeneous of degree 1 in c0") {
        const Eigen::RowVectorXd k1 = make_gain(refcase::published_P(), spec, 2, 0.5);
        const Eigen::RowVectorXd k2 = make_gain(refcase::published_P(), spec, 4, 0.5);
        CHECK((2.0 * k1 - k2).norm() <= 1e-12 * k2.norm());
    }
}

TEST_CASE("rates reproduce the published constants from the published P") {
    const DesignOutput out = rates(refcase::published_P(), reference_inputs());

    CHECK(std::abs(out.delta_alpha - refcase::published_delta_alpha) <= 1e-3);
    CHECK(out.delta_beta == refcase::published_delta_beta); // 3 + 1*4/10, exact
    CHECK(std::abs(out.max_off_ratio - 0.132) <= 2e-3);

    // ||P|| must be the spectral norm: cross-check against the closed-form
    // 2x2 eigenvalue, and c_beta = c2 c_z lambda_max(P) ~ 234.5.
    const auto [lmin, lmax] = eig2(refcase::published_P());
    CHECK(lmin > 0.0);
    CHECK(out.p_norm == doctest::Approx(lmax).epsilon(1e-10));
    CHECK(out.c_beta == doctest::Approx(refcase::c2 * refcase::c_z * lmax).epsilon(1e-12));
    CHECK(std::abs(out.c_beta - 234.5) <= 0.1);

    // Algebraic identity of the OFF budget.
    CHECK(out.max_off_ratio * out.delta_beta == doctest::Approx(out.delta_alpha).epsilon(1e-14));
}

TEST_CASE("rates reject a c2 that kills the ON decay") {
    DesignInputs in = reference_inputs();
    in.c2 = 0.1;
    CHECK_THROWS_WITH_AS(static_cast<void>(rates(refcase::published_P(), in)),
                         doctest::Contains("c2 too small"), InfeasibleError);
}

TEST_CASE("accepted P plugs back into the inequalities") {
    // Residual property over a sweep of feasible constants. (The decay
    // inequality couples c1 and c3: c1 = 40 with c3 = 3 is genuinely
    // infeasible for the chain of order 2.)
    for (double c1 : {5.0, 10.0, 20.0, 30.0}) {
        const ChainSpec spec = ChainSpec::of_order(2);
        const RiccatiSolution sol = solve_P(spec, c1, 3.0);
        Eigen::MatrixXd r1, r2;
        CHECK(check_inequalities(sol.P, spec, c1, 3.0, 0.0, &r1, &r2));
        CHECK(linalg::max_eigenvalue(r1) < 0.0);
        CHECK(linalg::max_eigenvalue(r2) < 0.0);
    }
}

TEST_CASE("order-3 chain solves and verifies") {
    const ChainSpec spec = ChainSpec::of_order(3);
    const RiccatiSolution sol = solve_P(spec, 6.0, 4.0);
    CHECK(check_inequalities(sol.P, spec, 6.0, 4.0, 0.0));
    CHECK(linalg::min_eigenvalue(sol.P) > 0.0);
}

TEST_CASE("design_chain wires the pinning check") {
    DesignInputs in = reference_inputs();
    CHECK_THROWS_AS(static_cast<void>(design_chain(ChainSpec::of_order(2), 0.05, in)),
                    InfeasibleError);
    const DesignOutput out = design_chain(ChainSpec::of_order(2), 0.1981, in);
    CHECK(out.K.size() == 2);
    CHECK(out.delta_beta == 3.4);
}
