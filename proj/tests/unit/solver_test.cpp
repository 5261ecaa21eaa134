#include <cmath>

#include "doctest.h"
#include "ddl/errors.hpp"
#include "ddl/solver.hpp"
#include "support.hpp"

using namespace ddl;

TEST_CASE("integrating factor is exact for the linear flow") {
    PeriodicGrid g(1, 64);
    const Field th = gen::from_function(g, [](double x, double) { return std::cos(3 * x); });
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 1.0;
    cfg.nonlinear = false;
    cfg.epsilon = 1e-2;
    cfg.record_every = 5;
    const auto res = simulate(th, VelocityModel::burgers(), symbol_from_multiplier(RadialProfile::power(0.5), g), cfg);
    const double decay = std::exp(-(std::sqrt(3.0) + 9.0 * cfg.epsilon) * 1.0);
    CHECK(res.t_final == doctest::Approx(1.0));
    CHECK(res.steps == 20);
    CHECK_FALSE(res.blowup);
    CHECK(norm_linf(res.final_state) == doctest::Approx(decay).epsilon(1e-12));
}

TEST_CASE("energy balance for the linear flow") {
    PeriodicGrid g(1, 64);
    SplitMix64 rng(4);
    const Field th = gen::trig_field(rng, g, 8);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    cfg.nonlinear = false;
    cfg.record_every = 1;
    const auto res = simulate(th, VelocityModel::burgers(), symbol_from_multiplier(RadialProfile::power(1.0), g), cfg);
    const double l0 = res.series.front().l2, l1 = res.series.back().l2;
    CHECK(0.5 * (l0 * l0 - l1 * l1) == doctest::Approx(res.series.back().energy_dissipated).epsilon(1e-4));
}

TEST_CASE("maximum principle for random small data") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 4; ++trial) {
        PeriodicGrid g(1, 128);
        const Field th = gen::trig_field(rng, g, 4);
        SolverConfig cfg;
        cfg.dt = 2e-3;
        cfg.t_end = 0.4;
        cfg.record_every = 5;
        const auto model = trial % 2 ? VelocityModel::ccf() : VelocityModel::burgers();
        const auto res = simulate(th, model, symbol_from_multiplier(RadialProfile::power(1.0), g), cfg);
        const auto mon = max_principle_monitor(res.series, monitor_norm_for(model));
        CHECK(mon.pass);
        CHECK(mon.records == int(res.series.size()));
    }
    CHECK(monitor_norm_for(VelocityModel::sqg()) == MonitorNorm::l2);
    CHECK(monitor_norm_for(VelocityModel::burgers()) == MonitorNorm::linf);
}

TEST_CASE("sup norm of the interpolant sits between grid points") {
    PeriodicGrid g(1, 16);
    const Field f = gen::from_function(g, [](double x, double) { return std::cos(x - 0.2); });
    CHECK(norm_linf(f) < 0.99);
    CHECK(spectral_sup_norm(f) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("CFL restriction and validation") {
    PeriodicGrid g(1, 64);
    SolverConfig cfg;
    cfg.dt = 0.1;
    cfg.cfl_safety = 0.5;
    Stepper s(VelocityModel::burgers(), zero_operator(g), cfg);
    CHECK(s.cfl_dt(2.0) == doctest::Approx(0.25 * g.h()));
    CHECK(s.cfl_dt(0.0) == doctest::Approx(0.1));
    SolverConfig bad;
    bad.dt = -1.0;
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    CHECK_THROWS_AS(local_time_estimate(0.0, 1.0), ArgumentError);
    CHECK(local_time_estimate(2.0, 0.25) == doctest::Approx(2.0));
}

TEST_CASE("detector fires on a forced singularity") {
    PeriodicGrid g(1, 256);
    const Field th = gen::from_function(g, [](double x, double) { return 4.0 * std::sin(x); });
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 2.0;
    cfg.record_every = 10;
    cfg.blowup_grad = 50.0;
    const auto res = simulate(th, VelocityModel::burgers(), zero_operator(g), cfg);
    // Inviscid Burgers from 4 sin x steepens at t = 1/4.
    CHECK(res.blowup);
    CHECK(res.blowup_hi < 0.3);
    CHECK(res.blowup_lo <= res.blowup_hi);
}
