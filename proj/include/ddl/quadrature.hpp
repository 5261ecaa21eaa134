#pragma once

#include <functional>

namespace ddl {

struct QuadratureParams {
    double rel_tol = 1e-10;
    double abs_tol = 1e-15;
    int max_intervals = 4000;   // per adaptive call
    int max_panels = 4000;      // geometric panels for semi-infinite ranges
    double tail_cut = 1e-14;    // panel dropped once below this fraction of the running sum
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

using Integrand = std::function<double(double)>;

// Adaptive Gauss-Kronrod (7/15) on [a, b]. Throws ConvergenceError when the
// interval budget is exhausted before the tolerance is met.
QuadResult integrate(const Integrand& f, double a, double b, const QuadratureParams& q = {});

// Integral over [a, inf) using doubling panels [a 2^j, a 2^{j+1}]; stops once
// three consecutive panels fall below q.tail_cut of the accumulated value.
QuadResult integrate_to_infinity(const Integrand& f, double a, const QuadratureParams& q = {});

// Integral over (0, b] using halving panels toward the origin, for integrable
// endpoint singularities.
QuadResult integrate_from_zero(const Integrand& f, double b, const QuadratureParams& q = {});

}  // namespace ddl
