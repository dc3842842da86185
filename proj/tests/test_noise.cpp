#include "doctest.h"

#include "imc/errors.hpp"
#include "imc/noise.hpp"
#include "imc/rng.hpp"

#include <cmath>
#include <vector>

using namespace imc;

TEST_CASE("zero power forces an identically-zero path") {
    NoiseParams p;
    p.power = 0.0;
    NoiseProcess proc(p, 42);
    for (int k = 0; k < 1000; ++k) CHECK(proc.step(1e-3).norm() == 0.0);
}

TEST_CASE("held-white stage and exact filter update") {
    NoiseParams p;
    p.time_constant = 0.1;
    p.power = 1.0;
    p.correlation_time = 10.0; // one hold covers the whole test window
    const std::uint64_t seed = 7;

    // Oracle: the first held sample comes straight off the stream.
    Rng stream(seed);
    const double w0 = p.held_sample_std() * stream.gaussian();

    NoiseProcess proc(p, seed);
    const double dt = 0.01;
    double t = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double xi = proc.step(dt)[0];
        t += dt;
        // First-order step response: xi(t) = w0 (1 - e^{-t/X}) exactly,
        // because the exponential updates compose exactly for constant w.
        CHECK(xi == doctest::Approx(w0 * (1.0 - std::exp(-t / p.time_constant))).epsilon(1e-12));
    }
}

TEST_CASE("step larger than the correlation time is rejected") {
    NoiseProcess proc(NoiseParams{}, 1);
    CHECK_THROWS_WITH_AS(static_cast<void>(proc.step(0.2)),
                         doctest::Contains("step larger than correlation time"), ValidationError);
    CHECK_THROWS_AS(static_cast<void>(proc.step(-1.0)), ValidationError);
}

TEST_CASE("identical seeds give bit-identical paths") {
    NoiseProcess a(NoiseParams{}, 99), b(NoiseParams{}, 99);
    for (int k = 0; k < 5000; ++k) CHECK(a.step(1e-3)[0] == b.step(1e-3)[0]);
}

TEST_CASE("distinct seeds decorrelate the streams") {
    NoiseProcess a(NoiseParams{}, 23341), b(NoiseParams{}, 34243);
    const int n = 100000;
    double saa = 0.0, sbb = 0.0, sab = 0.0, sa = 0.0, sb = 0.0;
    for (int k = 0; k < n; ++k) {
        const double va = a.step(1e-3)[0];
        const double vb = b.step(1e-3)[0];
        sa += va;
        sb += vb;
        saa += va * va;
        sbb += vb * vb;
        sab += va * vb;
    }
    const double ma = sa / n, mb = sb / n;
    const double corr = (sab / n - ma * mb) /
                        std::sqrt((saa / n - ma * ma) * (sbb / n - mb * mb));
    CHECK(std::abs(corr) < 0.1);
}

TEST_CASE("long-run second moment matches the discretized-filter recursion") {
    NoiseParams p; // X = 0.1, A = 1, t_c = 0.1
    const double dt = 1e-4;
    const int steps = 1000000; // 100 s

    // Oracle: propagate the variance recursion of the held-sample filter
    // numerically to stationarity, then average over the hold phases.
    // Across one hold of a fresh sample w (independent of the boundary state):
    //   Var(s) = e^{-2s/X} Var(0) + (1 - e^{-s/X})^2 Var(w).
    const double sw2 = p.power / p.correlation_time;
    const int hold_steps = static_cast<int>(std::llround(p.correlation_time / dt));
    const double e1 = std::exp(-p.correlation_time / p.time_constant);
    double vb = 0.0; // variance at hold boundaries
    for (int it = 0; it < 10000; ++it) {
        const double next = e1 * e1 * vb + (1.0 - e1) * (1.0 - e1) * sw2;
        if (std::abs(next - vb) < 1e-14) {
            vb = next;
            break;
        }
        vb = next;
    }
    double expected = 0.0;
    for (int k = 1; k <= hold_steps; ++k) {
        const double s = k * dt;
        const double es = std::exp(-s / p.time_constant);
        expected += es * es * vb + (1.0 - es) * (1.0 - es) * sw2;
    }
    expected /= hold_steps;

    NoiseProcess proc(p, 12345);
    double acc = 0.0;
    for (int k = 0; k < steps; ++k) {
        const double v = proc.step(dt)[0];
        acc += v * v;
    }
    const double empirical = acc / steps;
    CHECK(std::abs(empirical - expected) <= 0.25 * expected);
}

TEST_CASE("stationarity: early and late windows agree") {
    NoiseParams p;
    NoiseProcess proc(p, 2026);
    const int steps = 200000; // 200 s at 1 ms
    std::vector<double> sq(steps);
    for (int k = 0; k < steps; ++k) {
        const double v = proc.step(1e-3)[0];
        sq[static_cast<std::size_t>(k)] = v * v;
    }
    auto window_mean = [&](int lo, int hi) {
        double s = 0.0;
        for (int k = lo; k < hi; ++k) s += sq[static_cast<std::size_t>(k)];
        return s / (hi - lo);
    };
    const double w1 = window_mean(steps / 4, steps / 2);
    const double w2 = window_mean(3 * steps / 4, steps);
    CHECK(std::abs(w1 - w2) <= 0.2 * std::max(w1, w2));
}

TEST_CASE("second_moment_bound") {
    NoiseParams p;

    SUBCASE("zero power gives zero") {
        NoiseParams z = p;
        z.power = 0.0;
        CHECK(second_moment_bound(z, 5.0, 1e-3, 10, 1) == 0.0);
    }
    SUBCASE("ensemble precondition") {
        CHECK_THROWS_AS(static_cast<void>(second_moment_bound(p, 5.0, 1e-3, 5, 1)),
                        ValidationError);
    }
    SUBCASE("stable across disjoint batches") {
        const double b1 = second_moment_bound(p, 20.0, 1e-3, 50, 101);
        const double b2 = second_moment_bound(p, 20.0, 1e-3, 50, 202);
        CHECK(b1 > 0.0);
        CHECK(std::abs(b1 - b2) <= 0.10 * std::max(b1, b2));
    }
    SUBCASE("doubling the power doubles the bound") {
        NoiseParams twice = p;
        twice.power = 2.0;
        const double b1 = second_moment_bound(p, 20.0, 1e-3, 50, 77);
        const double b2 = second_moment_bound(twice, 20.0, 1e-3, 50, 77);
        CHECK(std::abs(b2 - 2.0 * b1) <= 0.15 * 2.0 * b1);
    }
}

TEST_CASE("vector-valued disturbance") {
    NoiseParams p;
    p.dim = 3;
    NoiseProcess proc(p, 8);
    const Eigen::VectorXd v = proc.step(1e-3);
    CHECK(v.size() == 3);
    CHECK(v.allFinite());
}
