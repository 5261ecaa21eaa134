#include <cmath>

#include "doctest.h"
#include "ddl/errors.hpp"
#include "ddl/velocity.hpp"
#include "support.hpp"

using namespace ddl;

namespace {

double max_diff(const Field& a, double (*f)(double, double)) {
    const Field b = gen::from_function(a.grid(), f);
    double m = 0.0;
    for (std::size_t i = 0; i < a.grid().size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("Hilbert transform maps sine to cosine") {
    PeriodicGrid g(1, 64);
    const auto u = apply_velocity(VelocityModel::ccf(), gen::from_function(g, [](double x, double) { return std::sin(x); }));
    REQUIRE(u.size() == 1);
    CHECK(max_diff(u[0], [](double x, double) { return std::cos(x); }) < 1e-13);
    const auto v = apply_velocity(VelocityModel::ccf(), gen::from_function(g, [](double x, double) { return std::cos(4 * x); }));
    CHECK(max_diff(v[0], [](double x, double) { return -std::sin(4 * x); }) < 1e-13);
}

TEST_CASE("SQG velocity is the perpendicular gradient of the stream function") {
    PeriodicGrid g(2, 32);
    const auto u = apply_velocity(VelocityModel::sqg(), gen::from_function(g, [](double, double y) { return std::cos(y); }));
    REQUIRE(u.size() == 2);
    CHECK(max_diff(u[0], [](double, double y) { return std::sin(y); }) < 1e-13);
    CHECK(max_diff(u[1], [](double, double) { return 0.0; }) < 1e-13);
}

TEST_CASE("IPM symbol on a horizontal mode") {
    const auto P = velocity_symbol(VelocityModel::ipm2d(), 2, 0);
    CHECK(std::abs(P[0]) < 1e-15);
    CHECK(P[1].real() == doctest::Approx(1.0));
    const auto Q = velocity_symbol(VelocityModel::ipm2d(), 0, 3);
    CHECK(std::abs(Q[0]) + std::abs(Q[1]) < 1e-15);
    CHECK(a_norm(VelocityModel::ipm2d()) == doctest::Approx(0.5));
}

TEST_CASE("two-dimensional models are divergence free on random data") {
    SplitMix64 rng(13);
    for (int trial = 0; trial < 12; ++trial) {
        PeriodicGrid g(2, 16 * gen::integer(rng, 1, 2));
        const Field th = gen::trig_field(rng, g, 6);
        for (const auto& m : {VelocityModel::sqg(), VelocityModel::ipm2d()}) {
            const auto u = apply_velocity(m, th);
            double umax = 0.0;
            for (const auto& c : u)
                for (double v : c.values()) umax = std::max(umax, std::abs(v));
            CHECK(divergence_residual(m, th) <= 1e-12 * std::max(1.0, umax * g.N()));
        }
    }
}

TEST_CASE("odd custom kernel in one dimension reproduces the Hilbert transform") {
    const auto custom = VelocityModel::custom({0.0}, {{1.0 / M_PI}, {-1.0 / M_PI}});
    for (int k = -9; k <= 9; ++k) {
        const auto a = velocity_symbol(custom, k), b = velocity_symbol(VelocityModel::ccf(), k);
        CHECK(std::abs(a[0] - b[0]) < 1e-14);
    }
    CHECK(psi_max(custom) == doctest::Approx(1.0 / M_PI));
}

TEST_CASE("symbol bound and validation") {
    PeriodicGrid g(2, 16);
    CHECK(velocity_l2_bound(VelocityModel::sqg(), g) == doctest::Approx(1.0));
    CHECK(velocity_l2_bound(VelocityModel::ipm2d(), g) == doctest::Approx(1.5));
    CHECK_THROWS_AS(VelocityModel::custom({0.0, 0.0}, {{1.0}}).validate(), ArgumentError);
    CHECK_THROWS_AS(parse_velocity_kind("navier"), ArgumentError);
    CHECK(velocity_kind_name(parse_velocity_kind("sqg")) == "sqg");
}

TEST_CASE("IPM kernel quadrature agrees with the multiplier") {
    PeriodicGrid g(2, 32);
    SplitMix64 rng(99);
    const CrosscheckReport r = ipm_kernel_crosscheck(gen::trig_field(rng, g, 3));
    CHECK(r.u_max > 0.0);
    CHECK(r.max_rel < 1e-3);
}
