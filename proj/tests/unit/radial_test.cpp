#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "doctest.h"
#include "ddl/errors.hpp"
#include "ddl/radial.hpp"
#include "support.hpp"

using namespace ddl;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return r;
}

// 2 int_0^inf (1 - cos(zeta r)) K(r) dr, with the oscillatory tail beyond r = 1
// handled by Ooura's double-exponential Fourier rules.
double symbol_oracle_1d(const KernelSpec& spec, double zeta) {
    using namespace boost::math::quadrature;
    auto K = [&](double r) { return kernel_value(spec, r); };
    tanh_sinh<double> ts;
    exp_sinh<double> es;
    const double near =
        ts.integrate([&](double r) { return r > 1e-150 ? 2.0 * std::pow(std::sin(0.5 * zeta * r), 2) * K(r) : 0.0; }, 0.0, 1.0);
    const double tail = es.integrate([&](double t) { return K(1.0 + t); }, 0.0, INFINITY);
    ooura_fourier_cos<double> fc;
    ooura_fourier_sin<double> fs;
    auto shifted = [&](double t) { return K(1.0 + t); };
    const double c = fc.integrate(shifted, zeta).first;
    const double s = fs.integrate(shifted, zeta).first;
    return 2.0 * (near + tail - (std::cos(zeta) * c - std::sin(zeta) * s));
}

}  // namespace

TEST_CASE("analytic families and their derivatives") {
    const auto p = RadialProfile::power_log(0.8, 0.5, std::exp(1.0), 0.35);
    for (double r : {1e-3, 0.1, 1.0, 7.0, 1e4}) {
        const double m = std::pow(r, 0.8) / std::pow(std::log(std::exp(1.0) + r), 0.5);
        CHECK(eval_m(p, r) == doctest::Approx(m).epsilon(1e-14));
        const double dm = m * (0.8 / r - 0.5 / ((std::exp(1.0) + r) * std::log(std::exp(1.0) + r)));
        CHECK(eval_dm(p, r) == doctest::Approx(dm).epsilon(1e-12));
    }
    const auto q = RadialProfile::power(0.3);
    CHECK(eval_m(q, 4.0) == doctest::Approx(std::pow(4.0, 0.3)));
    CHECK(eval_dm(q, 4.0) == doctest::Approx(0.3 * std::pow(4.0, -0.7)));
}

TEST_CASE("log-log table interpolation reproduces a power law") {
    std::vector<double> r = log_grid(1e-2, 1e2, 9), m;
    for (double x : r) m.push_back(std::pow(x, 0.6));
    const auto t = RadialProfile::table(r, m, 0.6, 0.0);
    SplitMix64 rng(21);
    for (int i = 0; i < 50; ++i) {
        const double x = std::exp(gen::uniform(rng, std::log(1e-2), std::log(1e2)));
        CHECK(eval_m(t, x) == doctest::Approx(std::pow(x, 0.6)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(eval_m(t, 1e3), RangeError);
}

TEST_CASE("profile validation") {
    CHECK_THROWS_AS(RadialProfile::power(1.5).validate(), ArgumentError);
    CHECK_THROWS_AS(RadialProfile::power(0.0).validate(), ArgumentError);
    CHECK_THROWS_AS(RadialProfile::table({1.0, 2.0}, {1.0}, 0.5, 0.0).validate(), ArgumentError);
    CHECK_THROWS_AS(parse_family("cubic"), ArgumentError);
    CHECK(parse_family("power_log") == ProfileFamily::power_log);
}

TEST_CASE("differential inequality check") {
    const auto grid = log_grid(1e-4, 1e6, 200);
    CHECK(check_mdec(RadialProfile::power(0.7), grid).pass);
    CHECK(check_mdec(RadialProfile::power_log(1.0, 0.5, std::exp(1.0), 0.35), grid).pass);
    // A logarithmic correction needs sigma > 0.
    const auto bad = check_mdec(RadialProfile::power_log(1.0, 0.5, std::exp(1.0), 0.0), grid);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_margin < 0.0);
}

TEST_CASE("random power profiles satisfy the inequality and the monotone maps") {
    const auto lg = RadialProfile::power_log(0.9, 1.0, std::exp(1.0), 0.35);
    const auto rep = monotone_maps_check(lg, 0.9, 0.55, log_grid(1e-3, 1e3, 60));
    CHECK(rep.pass);
    SplitMix64 rng(8);
    const auto grid = log_grid(1e-3, 1e3, 60);
    for (int trial = 0; trial < 30; ++trial) {
        const double a = gen::uniform(rng, 0.05, 1.0);
        const auto p = RadialProfile::power(a);
        CHECK(check_mdec(p, grid).pass);
        CHECK(monotone_maps_check(p, a, a, grid, 1e-9).pass);
        CHECK_THROWS_AS(monotone_maps_check(p, 0.9 * a, a, grid), ArgumentError);
    }
}

TEST_CASE("fractional Laplacian normalization") {
    CHECK(fractional_laplacian_scale(1, 1.0) == doctest::Approx(1.0 / M_PI).epsilon(1e-14));
    CHECK(fractional_laplacian_scale(2, 1.0) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-14));
    CHECK(fractional_laplacian_scale(1, 0.5) == doctest::Approx(0.19947114020071646).epsilon(1e-12));
    CHECK_THROWS_AS(fractional_laplacian_scale(1, 2.0), ArgumentError);
}

TEST_CASE("kernel quadrature recovers |zeta|^alpha") {
    for (int d : {1, 2}) {
        for (double a : {0.4, 0.7, 1.0}) {
            KernelSpec s{RadialProfile::power(a), 1.0, 1.0, KernelCase::III, d, fractional_laplacian_scale(d, a)};
            for (double z : {1.0, 3.0, 10.0}) {
                std::vector<double> zeta(d, 0.0);
                zeta[0] = z * 0.6;
                if (d == 2) zeta[1] = z * 0.8;
                else zeta[0] = z;
                const SymbolValue v = symbol_from_kernel(s, zeta);
                CHECK(v.value == doctest::Approx(std::pow(z, a)).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("kernel quadrature against an Ooura oracle for a log-corrected kernel") {
    KernelSpec s{RadialProfile::power_log(0.6, 1.0, std::exp(1.0), 0.35), 1.0, 1.0, KernelCase::III, 1, 1.0};
    for (double z : {1.0, 4.0, 25.0}) {
        const double oracle = symbol_oracle_1d(s, z);
        CHECK(symbol_from_kernel(s, {z}).value == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("kernel inversion of the multiplier") {
    const double a = 0.5, C = fractional_laplacian_scale(1, a);
    const std::vector<double> radii = {0.05, 0.1, 0.3, 1.0, 2.0};
    const KernelSample ks = kernel_from_multiplier(RadialProfile::power(a), radii, 16384.0);
    REQUIRE(ks.K.size() == radii.size());
    CHECK(ks.nonnegative);
    for (std::size_t i = 0; i < radii.size(); ++i)
        CHECK(ks.K[i] == doctest::Approx(C * std::pow(radii[i], -1.0 - a)).epsilon(2e-2));
    CHECK_THROWS_AS(kernel_from_multiplier(RadialProfile::power(a), {1e-3}, 1024.0), ResolutionError);
}

TEST_CASE("symbol lower bound fit on the multiplier table") {
    PeriodicGrid g(2, 32);
    const auto op = symbol_from_multiplier(RadialProfile::power(0.8), g);
    const SymbolFit fit = symbol_lower_bound_fit(op, 0.8, 0.0);
    CHECK(fit.C_low == doctest::Approx(1.0));
    CHECK(fit.C_off == doctest::Approx(0.0));
    CHECK(fit.pure_power_form);
    const auto zero = zero_operator(g);
    for (double v : zero.symbol) CHECK(v == 0.0);
}
