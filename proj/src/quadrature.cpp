#include "ddl/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

#include "ddl/errors.hpp"

namespace ddl {
namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece kronrod(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double gauss = fc * kWg[3];
    double kron = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double s = f(c - dx) + f(c + dx);
        kron += kWgk[j] * s;
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadratureParams& q) {
    QuadResult out;
    if (a == b) return out;
    std::priority_queue<Piece> heap;
    Piece first = kronrod(f, a, b);
    heap.push(first);
    double total = first.value;
    double err = first.error;
    int pieces = 1;
    out.evaluations = 15;
    while (err > std::max(q.abs_tol, q.rel_tol * std::abs(total))) {
        if (pieces >= q.max_intervals) {
            throw ConvergenceError("adaptive quadrature exceeded its interval budget", total);
        }
        Piece worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Piece left = kronrod(f, worst.a, mid);
        Piece right = kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++pieces;
        out.evaluations += 30;
        if (!std::isfinite(total)) {
            throw ConvergenceError("non-finite integrand value", total);
        }
    }
    // Recompute the error sum to avoid drift from the incremental updates.
    double e = 0.0;
    while (!heap.empty()) {
        e += heap.top().error;
        heap.pop();
    }
    out.value = total;
    out.error = e;
    return out;
}

namespace {

template <class NextPanel>
QuadResult panel_sum(const Integrand& f, double start, NextPanel next, const QuadratureParams& q) {
    QuadResult out;
    QuadratureParams inner = q;
    inner.abs_tol = 0.0;
    double lo = start;
    int quiet = 0;
    for (int j = 0; j < q.max_panels; ++j) {
        const double hi = next(lo);
        QuadratureParams p = inner;
        p.abs_tol = std::max(q.abs_tol, q.tail_cut * 1e-2 * std::abs(out.value));
        QuadResult r = integrate(f, std::min(lo, hi), std::max(lo, hi), p);
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
        if (std::abs(r.value) <= q.tail_cut * std::abs(out.value) || (out.value == 0.0 && r.value == 0.0)) {
            if (++quiet >= 3) return out;
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    throw ConvergenceError("panel sum did not reach the tail cut", out.value);
}

}  // namespace

QuadResult integrate_to_infinity(const Integrand& f, double a, const QuadratureParams& q) {
    if (!(a > 0.0)) throw ArgumentError("integrate_to_infinity needs a > 0");
    return panel_sum(f, a, [](double x) { return 2.0 * x; }, q);
}

QuadResult integrate_from_zero(const Integrand& f, double b, const QuadratureParams& q) {
    if (!(b > 0.0)) throw ArgumentError("integrate_from_zero needs b > 0");
    return panel_sum(f, b, [](double x) { return 0.5 * x; }, q);
}

}  // namespace ddl
