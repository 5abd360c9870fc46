#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "svrsim/svr_control.hpp"

using namespace svrsim;

TEST_CASE("regulation point follows the flow sign, ties retain") {
    CHECK(select_regulation_point(0.5, RegulatedSide::Upstream) ==
          RegulatedSide::Downstream);
    CHECK(select_regulation_point(-0.5, RegulatedSide::Downstream) ==
          RegulatedSide::Upstream);
    CHECK(select_regulation_point(0.0, RegulatedSide::Upstream) ==
          RegulatedSide::Upstream);
    CHECK(select_regulation_point(0.0, RegulatedSide::Downstream) ==
          RegulatedSide::Downstream);
}

TEST_CASE("measuring element") {
    SvrConfig cfg; // v_ref 1.0, deadband 0.01, eps 0

    CHECK(measure(1.0, cfg, false).direction == ActDirection::None);
    CHECK(measure(1.015, cfg, false).direction == ActDirection::Lower);
    CHECK(measure(0.985, cfg, false).direction == ActDirection::Raise);
    CHECK(measure(1.009, cfg, false).direction == ActDirection::None);
    CHECK(measure(0.991, cfg, false).direction == ActDirection::None);
    CHECK_THROWS_AS(measure(0.0, cfg, false), Error);

    SECTION("band edge is exclusive") {
        // exactly representable edge: deadband 1/64, error exactly 1/64
        SvrConfig edge;
        edge.deadband_pu = 0.015625;
        CHECK(measure(1.015625, edge, false).direction == ActDirection::None);
        CHECK(measure(1.015626, edge, false).direction == ActDirection::Lower);
    }
    SECTION("hysteresis keeps the element active near the edge") {
        cfg.hysteresis_pu = 0.004;
        CHECK(measure(1.007, cfg, true).direction == ActDirection::Lower);
        CHECK(measure(1.007, cfg, false).direction == ActDirection::None);
        CHECK(measure(1.005, cfg, true).direction == ActDirection::None);
    }
    SECTION("zero hysteresis degrades to a pure comparator") {
        cfg.hysteresis_pu = 0.0;
        for (double v : {0.9850, 0.9950, 1.0050, 1.0095, 1.0150})
            CHECK(measure(v, cfg, true).direction == measure(v, cfg, false).direction);
    }
    SECTION("full-width band convention halves the trigger threshold") {
        cfg.band_is_full_width = true;
        CHECK(measure(1.007, cfg, false).direction == ActDirection::Lower);
        CHECK(measure(1.004, cfg, false).direction == ActDirection::None);
    }
}

TEST_CASE("timer: double delay scheme") {
    SvrConfig cfg;
    cfg.t1_s = 30.0;
    cfg.t2_s = 5.0;
    SvrState st;
    const Activation low{ActDirection::Lower};
    const Activation none{};

    SECTION("first command after exactly ceil(t1/dt) active steps") {
        int steps = 0;
        std::optional<ActDirection> cmd;
        while (!cmd) {
            auto out = step_timer(st, low, 1.0, cfg);
            st = out.state;
            cmd = out.command;
            ++steps;
            REQUIRE(steps <= 31);
        }
        CHECK(steps == 30);
        CHECK(*cmd == ActDirection::Lower);
        CHECK_FALSE(st.first_delay_armed);

        SECTION("subsequent commands after ceil(t2/dt) steps") {
            int more = 0;
            std::optional<ActDirection> next;
            while (!next) {
                auto out = step_timer(st, low, 1.0, cfg);
                st = out.state;
                next = out.command;
                ++more;
                REQUIRE(more <= 6);
            }
            CHECK(more == 5);
        }
    }

    SECTION("violation clearing mid-count cancels and re-arms t1") {
        for (int i = 0; i < 15; ++i) st = step_timer(st, low, 1.0, cfg).state;
        REQUIRE(st.timer_s.has_value());
        auto out = step_timer(st, none, 1.0, cfg);
        st = out.state;
        CHECK_FALSE(out.command.has_value());
        CHECK_FALSE(st.timer_s.has_value());
        CHECK(st.first_delay_armed);
        // the next episode waits the full t1 again
        int steps = 0;
        std::optional<ActDirection> cmd;
        while (!cmd) {
            auto o = step_timer(st, low, 1.0, cfg);
            st = o.state;
            cmd = o.command;
            ++steps;
            REQUIRE(steps <= 31);
        }
        CHECK(steps == 30);
    }

    SECTION("fine steps accumulate to the same expiry") {
        int steps = 0;
        std::optional<ActDirection> cmd;
        while (!cmd) {
            auto out = step_timer(st, low, 0.1, cfg);
            st = out.state;
            cmd = out.command;
            ++steps;
            REQUIRE(steps <= 301);
        }
        CHECK(steps == 300);
    }

    SECTION("zero delays emit on the first step") {
        cfg.t1_s = cfg.t2_s = 0.0;
        auto out = step_timer(st, low, 1.0, cfg);
        CHECK(out.command.has_value());
    }

    SECTION("non-positive dt rejected") {
        CHECK_THROWS_AS(step_timer(st, low, 0.0, cfg), Error);
    }
}

TEST_CASE("tap application") {
    SvrConfig cfg;
    SvrState st;

    st.tap = 15;
    st = apply_tap(st, TapCommand::Raise, cfg);
    CHECK(st.tap == 16);
    CHECK(st.op_count == 1);
    CHECK(st.at_limit);

    st = apply_tap(st, TapCommand::Raise, cfg);
    CHECK(st.tap == 16);
    CHECK(st.op_count == 1); // unchanged at the stop
    CHECK(st.at_limit);

    st = apply_tap(st, TapCommand::Lower, cfg);
    CHECK(st.tap == 15);
    CHECK(st.op_count == 2);
    CHECK_FALSE(st.at_limit);

    SvrState zero;
    zero = apply_tap(zero, TapCommand::Lower, cfg);
    CHECK(zero.tap == -1);
}

TEST_CASE("voltage intent maps onto tap direction per regulated side") {
    CHECK(tap_command_for(ActDirection::Raise, RegulatedSide::Downstream) ==
          TapCommand::Raise);
    CHECK(tap_command_for(ActDirection::Lower, RegulatedSide::Downstream) ==
          TapCommand::Lower);
    CHECK(tap_command_for(ActDirection::Raise, RegulatedSide::Upstream) ==
          TapCommand::Lower);
    CHECK(tap_command_for(ActDirection::Lower, RegulatedSide::Upstream) ==
          TapCommand::Raise);
}

TEST_CASE("controller properties over randomized sequences") {
    std::mt19937 rng(20240811u);

    SECTION("tap stays within range under arbitrary command streams") {
        SvrConfig cfg;
        std::uniform_int_distribution<int> coin(0, 1);
        for (int run = 0; run < 100; ++run) {
            SvrState st;
            st.tap = std::uniform_int_distribution<int>(-16, 16)(rng);
            int ops = 0;
            for (int i = 0; i < 200; ++i) {
                const int before = st.tap;
                st = apply_tap(st, coin(rng) ? TapCommand::Raise : TapCommand::Lower,
                               cfg);
                REQUIRE(st.tap >= cfg.tap_min);
                REQUIRE(st.tap <= cfg.tap_max);
                if (st.tap != before) ++ops;
            }
            CHECK(st.op_count == ops);
        }
    }

    SECTION("no command while the voltage stays inside the deadband") {
        SvrConfig cfg;
        std::uniform_real_distribution<double> inband(-cfg.deadband_pu, cfg.deadband_pu);
        for (int run = 0; run < 2000; ++run) {
            SvrState st;
            for (int i = 0; i < 50; ++i) {
                const double v = cfg.v_ref_pu + inband(rng);
                const Activation act = measure(v, cfg, st.was_active);
                st.was_active = act.active();
                auto out = step_timer(st, act, 1.0, cfg);
                st = out.state;
                REQUIRE_FALSE(out.command.has_value());
            }
        }
    }

    SECTION("first and subsequent delays hold for arbitrary step sizes") {
        std::uniform_real_distribution<double> pick_dt(0.05, 8.0);
        std::uniform_real_distribution<double> pick_t(0.0, 60.0);
        for (int run = 0; run < 3000; ++run) {
            SvrConfig cfg;
            cfg.t2_s = pick_t(rng);
            cfg.t1_s = cfg.t2_s + pick_t(rng);
            const double dt = pick_dt(rng);
            const Activation low{ActDirection::Lower};
            SvrState st;

            auto steps_to_command = [&]() {
                int k = 0;
                while (true) {
                    auto out = step_timer(st, low, dt, cfg);
                    st = out.state;
                    ++k;
                    if (out.command) return k;
                    REQUIRE(k < 10000);
                }
            };
            const int expect1 = std::max(1, (int)std::ceil(cfg.t1_s / dt - 1e-9));
            const int expect2 = std::max(1, (int)std::ceil(cfg.t2_s / dt - 1e-9));
            REQUIRE(steps_to_command() == expect1);
            REQUIRE(steps_to_command() == expect2);
            REQUIRE(steps_to_command() == expect2);
        }
    }

    SECTION("hysteresis retention across the release region") {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int run = 0; run < 3000; ++run) {
            SvrConfig cfg;
            cfg.deadband_pu = 0.005 + 0.02 * u(rng);
            cfg.hysteresis_pu = 0.8 * cfg.deadband_pu * u(rng);
            const double sign = u(rng) < 0.5 ? 1.0 : -1.0;
            // trigger
            const Activation a0 =
                measure(cfg.v_ref_pu + sign * (cfg.deadband_pu + 0.01), cfg, false);
            REQUIRE(a0.active());
            // inside the band but above the release threshold: stays active
            const double hold = cfg.deadband_pu - 0.5 * cfg.hysteresis_pu;
            if (cfg.hysteresis_pu > 0.0) {
                const Activation a1 = measure(cfg.v_ref_pu + sign * hold, cfg, true);
                REQUIRE(a1.direction == a0.direction);
            }
            // below the release threshold: drops out
            const double release = cfg.deadband_pu - 1.5 * cfg.hysteresis_pu;
            if (release > 0.0) {
                const Activation a2 = measure(cfg.v_ref_pu + sign * release, cfg, true);
                REQUIRE_FALSE(a2.active());
            }
        }
    }

    SECTION("regulated side changes only on a signed flow") {
        std::uniform_real_distribution<double> flow(-1.0, 1.0);
        std::uniform_int_distribution<int> zero(0, 3);
        RegulatedSide side = RegulatedSide::Downstream;
        for (int i = 0; i < 4000; ++i) {
            const double p = zero(rng) == 0 ? 0.0 : flow(rng);
            const RegulatedSide prev = side;
            side = select_regulation_point(p, side);
            if (p == 0.0) REQUIRE(side == prev);
            else REQUIRE(side == (p > 0.0 ? RegulatedSide::Downstream
                                          : RegulatedSide::Upstream));
        }
    }
}
