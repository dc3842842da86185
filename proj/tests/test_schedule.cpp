#include "doctest.h"

#include "imc/errors.hpp"
#include "imc/refcase.hpp"
#include "imc/rng.hpp"
#include "imc/schedule.hpp"

#include <cmath>

using namespace imc;

namespace {

DesignOutput reference_design() {
    // Rates of the published P; only the rate fields matter here.
    DesignOutput d;
    d.delta_alpha = 0.4529;
    d.delta_beta = 3.4;
    d.c_beta = 234.5;
    d.max_off_ratio = d.delta_alpha / d.delta_beta;
    return d;
}

// Linear-scan oracle for interval membership.
Mode mode_oracle(const ModeSchedule& s, double t) {
    for (const Period& p : s.periods()) {
        if (t >= p.tau_on && t < p.tau_off) return Mode::on;
        if (t >= p.tau_off && t < p.tau_next) return Mode::off;
    }
    throw std::out_of_range("oracle: t outside schedule");
}

} // namespace

TEST_CASE("schedule invariants are validated") {
    CHECK_THROWS_AS(ModeSchedule({}), ValidationError);
    // First period must start at zero.
    CHECK_THROWS_AS(ModeSchedule({{0.5, 1.0, 1.5}}), ValidationError);
    // tau_on < tau_off required.
    CHECK_THROWS_AS(ModeSchedule({{0.0, 0.0, 1.0}}), ValidationError);
    // Contiguity.
    CHECK_THROWS_AS(ModeSchedule({{0.0, 1.0, 1.5}, {1.6, 2.0, 2.5}}), ValidationError);
    // A pure-ON period (tau_off == tau_next) is legal.
    const ModeSchedule ok({{0.0, 1.0, 1.0}, {1.0, 2.0, 2.5}});
    CHECK(ok.t_max() == doctest::Approx(1.5));
}

TEST_CASE("mode_at honors the half-open conventions") {
    const ModeSchedule s({{0.0, 1.0, 1.5}, {1.5, 2.5, 3.0}});
    CHECK(s.mode_at(0.0) == Mode::on);   // left-closed ON
    CHECK(s.mode_at(1.0) == Mode::off);  // left-closed OFF
    CHECK(s.mode_at(1.49) == Mode::off);
    CHECK(s.mode_at(1.5) == Mode::on);
    CHECK_THROWS(static_cast<void>(s.mode_at(3.0)));
    CHECK_THROWS(static_cast<void>(s.mode_at(-0.1)));
}

TEST_CASE("mode_at agrees with a linear-scan oracle on random probes") {
    const DesignOutput d = reference_design();
    ScheduleParams params;
    params.seed = 99;
    const ModeSchedule s = generate_schedule(params, d, 20.0);

    Rng rng(5);
    for (int probe = 0; probe < 10000; ++probe) {
        const double t = rng.uniform(0.0, s.end_time() * (1.0 - 1e-12));
        CHECK(s.mode_at(t) == mode_oracle(s, t));
    }
}

TEST_CASE("off_fraction zero produces a pure-ON schedule") {
    ScheduleParams params;
    params.off_fraction = 0.0;
    const ModeSchedule s = generate_schedule(params, reference_design(), 10.0);
    for (const Period& p : s.periods()) CHECK(p.off_duration() == 0.0);

    const ScheduleCertificate cert = certify(s, reference_design());
    for (const auto& pc : cert.periods)
        CHECK(pc.lambda_k == doctest::Approx(0.4529 * s.periods()[static_cast<std::size_t>(
                                                          pc.kappa)].on_duration()));
}

TEST_CASE("off duration follows the budget arithmetic") {
    const DesignOutput d = reference_design();
    ScheduleParams params;
    params.on_lo = params.on_hi = 1.0; // degenerate draw: every ON is 1 s
    params.off_fraction = 0.9;
    params.snap_dt = 0.0;
    const ModeSchedule s = generate_schedule(params, d, 10.0);
    const double expected = 0.9 * 1.0 * d.max_off_ratio; // ~ 0.1199
    for (const Period& p : s.periods()) {
        CHECK(p.on_duration() == doctest::Approx(1.0));
        CHECK(p.off_duration() == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("certificate arithmetic") {
    DesignOutput d = reference_design();

    SUBCASE("ON-only period certifies at delta_alpha") {
        const ModeSchedule s({{0.0, 1.0, 1.0}});
        const auto cert = certify(s, d);
        CHECK(cert.periods[0].lambda_k == doctest::Approx(0.4529));
        CHECK(cert.feasible);
    }
    SUBCASE("published-rate example") {
        const ModeSchedule s({{0.0, 1.0, 1.1199}});
        const auto cert = certify(s, d);
        CHECK(cert.periods[0].lambda_k ==
              doctest::Approx(0.4529 - 3.4 * 0.1199).epsilon(1e-9));
        CHECK(cert.periods[0].lambda_k > 0.0);
        CHECK(cert.feasible);
    }
    SUBCASE("boundary of the resilience condition is infeasible") {
        const double c = d.max_off_ratio * 1.0; // OFF exactly at the budget
        const ModeSchedule s({{0.0, 1.0, 1.0 + c}});
        const auto cert = certify(s, d);
        CHECK(std::abs(cert.periods[0].lambda_k) <= 1e-12);
        CHECK_FALSE(cert.feasible);
    }
}

TEST_CASE("certification is deterministic and schedule generation reproducible") {
    const DesignOutput d = reference_design();
    ScheduleParams params;
    params.seed = 1234;
    const ModeSchedule a = generate_schedule(params, d, 20.0);
    const ModeSchedule b = generate_schedule(params, d, 20.0);
    REQUIRE(a.periods().size() == b.periods().size());
    for (std::size_t k = 0; k < a.periods().size(); ++k) {
        CHECK(a.periods()[k].tau_on == b.periods()[k].tau_on);
        CHECK(a.periods()[k].tau_off == b.periods()[k].tau_off);
        CHECK(a.periods()[k].tau_next == b.periods()[k].tau_next);
    }
    const auto ca = certify(a, d);
    const auto cb = certify(b, d);
    for (std::size_t k = 0; k < ca.periods.size(); ++k)
        CHECK(ca.periods[k].lambda_k == cb.periods[k].lambda_k); // bit-for-bit
}

TEST_CASE("generated schedules stay feasible below the budget") {
    const DesignOutput d = reference_design();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        ScheduleParams params;
        params.seed = seed;
        params.off_fraction = 0.9;
        const ModeSchedule s = generate_schedule(params, d, 20.0);
        const auto cert = certify(s, d);
        CHECK(cert.feasible);
        CHECK(cert.lambda > 0.0);
    }
}

TEST_CASE("snapped schedules land on the grid and remain feasible") {
    const DesignOutput d = reference_design();
    ScheduleParams params;
    params.snap_dt = 1e-3;
    params.seed = 21;
    const ModeSchedule s = generate_schedule(params, d, 20.0);
    for (const Period& p : s.periods()) {
        for (double v : {p.tau_on, p.tau_off, p.tau_next}) {
            const double cells = v / 1e-3;
            CHECK(std::abs(cells - std::round(cells)) <= 1e-6);
        }
    }
    CHECK(certify(s, d).feasible);
    CHECK(s.end_time() > 20.0);
}

TEST_CASE("parameter validation") {
    ScheduleParams params;
    params.off_fraction = 1.5;
    CHECK_THROWS_AS(params.validate(), ValidationError);
    params.off_fraction = 0.5;
    params.on_lo = 0.0;
    CHECK_THROWS_AS(params.validate(), ValidationError);
}
