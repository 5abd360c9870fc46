#include <catch2/catch.hpp>

#include <sstream>

#include "svrsim/scenario.hpp"

using namespace svrsim;

namespace {

Scenario from_text(const std::string& text) {
    std::istringstream is(text);
    return parse_scenario(is, "<test>");
}

} // namespace

TEST_CASE("dg_power evaluates the ramp") {
    RampProfile ramp;
    ramp.p_max_mw = 2.5;

    CHECK(dg_power(ramp, 5.0) == 0.0);
    CHECK(dg_power(ramp, 10.0) == 0.0);
    CHECK(dg_power(ramp, 200.0) == 2.5);
    CHECK(dg_power(ramp, 350.0) == 2.5);
    CHECK(dg_power(ramp, 105.0) == Approx(1.25).epsilon(1e-15));

    SECTION("outside the horizon") {
        CHECK_THROWS_AS(dg_power(ramp, -1.0), Error);
        CHECK_THROWS_AS(dg_power(ramp, 351.0), Error);
    }
    SECTION("non-decreasing, continuous, and flat after the ramp end") {
        double prev = -1.0;
        for (double t = 0.0; t <= 350.0; t += 0.5) {
            const double p = dg_power(ramp, t);
            CHECK(p >= prev);
            prev = p;
        }
        for (double t = 200.0; t <= 350.0; t += 10.0)
            CHECK(dg_power(ramp, t) == 2.5);
        // continuity at the break points
        CHECK(dg_power(ramp, 10.0 + 1e-9) == Approx(0.0).margin(1e-9));
        CHECK(dg_power(ramp, 200.0 - 1e-9) == Approx(2.5).margin(1e-9));
    }
}

TEST_CASE("scenario files") {
    SECTION("defaults fill the missing keys") {
        Scenario s = from_text("ramp.p_max_mw = 2.5\n");
        CHECK(s.ramp.t_start_s == 10.0);
        CHECK(s.ramp.t_end_s == 200.0);
        CHECK(s.ramp.t_stop_s == 350.0);
        CHECK(s.qsts_dt_s == 1.0);
        CHECK(s.dyn_h_s == 0.1);
        CHECK(s.dyn_tau_m_s == 0.0);
    }
    SECTION("all keys") {
        Scenario s = from_text(R"(
ramp.t_start = 5
ramp.t_end = 100
ramp.p_max_mw = 1.5
t_stop = 120
qsts.dt = 2
dyn.h = 0.5
dyn.tau_m = 1.5
)");
        CHECK(s.ramp.t_end_s == 100.0);
        CHECK(s.qsts_dt_s == 2.0);
        CHECK(s.dyn_tau_m_s == 1.5);
    }
    SECTION("p_max is required") {
        CHECK_THROWS_AS(from_text("t_stop = 100\n"), ParseError);
    }
    SECTION("unknown keys are rejected") {
        CHECK_THROWS_AS(from_text("ramp.p_max_mw = 1\nbogus = 2\n"), ParseError);
    }
    SECTION("malformed lines are rejected") {
        CHECK_THROWS_AS(from_text("ramp.p_max_mw 1\n"), ParseError);
        CHECK_THROWS_AS(from_text("ramp.p_max_mw = abc\n"), ParseError);
    }
    SECTION("invariants enforced") {
        CHECK_THROWS_AS(from_text("ramp.p_max_mw = 1\nramp.t_start = 300\n"), Error);
        CHECK_THROWS_AS(from_text("ramp.p_max_mw = 1\ndyn.h = 2\n"), Error);
        CHECK_THROWS_AS(from_text("ramp.p_max_mw = -1\n"), Error);
        CHECK_THROWS_AS(from_text("ramp.p_max_mw = 1\nqsts.dt = 0\n"), Error);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(load_scenario("/nonexistent.scn"), Error);
    }
}
