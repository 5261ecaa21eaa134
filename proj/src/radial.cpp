#include "ddl/radial.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ddl/errors.hpp"

namespace ddl {
namespace {

constexpr double kPi = 3.14159265358979323846;

void check_common(const RadialProfile& p) {
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw ArgumentError("alpha must lie in (0, 1]");
    if (!(p.sigma >= 0.0 && p.sigma < p.alpha)) throw ArgumentError("sigma must lie in [0, alpha)");
    if (p.c0 && !(*p.c0 > 0.0)) throw ArgumentError("c0 must be positive");
}

double table_eval(const RadialProfile& p, double r) {
    const auto& R = p.table_r;
    const auto& M = p.table_m;
    if (r < R.front() || r > R.back()) {
        std::ostringstream os;
        os << "r = " << r << " outside the sampled range [" << R.front() << ", " << R.back() << "]";
        throw RangeError(os.str());
    }
    auto it = std::upper_bound(R.begin(), R.end(), r);
    std::size_t j = static_cast<std::size_t>(it - R.begin());
    if (j >= R.size()) j = R.size() - 1;
    if (j == 0) j = 1;
    const double r0 = R[j - 1], r1 = R[j], m0 = M[j - 1], m1 = M[j];
    if (p.interp == TableInterp::linear) {
        return m0 + (m1 - m0) * (r - r0) / (r1 - r0);
    }
    const double t = std::log(r / r0) / std::log(r1 / r0);
    return std::exp(std::log(m0) + t * (std::log(m1) - std::log(m0)));
}

}  // namespace

RadialProfile RadialProfile::power(double alpha) {
    RadialProfile p;
    p.family = ProfileFamily::power;
    p.alpha = alpha;
    p.validate();
    return p;
}

RadialProfile RadialProfile::power_log(double alpha, double mu, double lambda, double sigma,
                                       std::optional<double> c0) {
    RadialProfile p;
    p.family = ProfileFamily::power_log;
    p.alpha = alpha;
    p.mu = mu;
    p.lambda = lambda;
    p.sigma = sigma;
    p.c0 = c0;
    p.validate();
    return p;
}

RadialProfile RadialProfile::power_loglog(double mu, double lambda1, double lambda2, double sigma,
                                          std::optional<double> c0) {
    RadialProfile p;
    p.family = ProfileFamily::power_loglog;
    p.alpha = 1.0;
    p.mu = mu;
    p.lambda = lambda1;
    p.lambda2 = lambda2;
    p.sigma = sigma;
    p.c0 = c0;
    p.validate();
    return p;
}

RadialProfile RadialProfile::table(std::vector<double> r, std::vector<double> m, double alpha, double sigma,
                                   std::optional<double> c0, TableInterp interp) {
    RadialProfile p;
    p.family = ProfileFamily::table;
    p.table_r = std::move(r);
    p.table_m = std::move(m);
    p.alpha = alpha;
    p.sigma = sigma;
    p.c0 = c0;
    p.interp = interp;
    p.validate();
    return p;
}

void RadialProfile::validate() const {
    check_common(*this);
    switch (family) {
        case ProfileFamily::power:
            break;
        case ProfileFamily::power_log:
            if (mu < 0.0) throw ArgumentError("mu must be nonnegative");
            if (mu > 0.0 && !(lambda >= 1.0)) throw ArgumentError("power_log needs lambda >= 1 when mu > 0");
            if (mu == 0.0 && lambda < 0.0) throw ArgumentError("lambda must be nonnegative");
            break;
        case ProfileFamily::power_loglog:
            if (alpha != 1.0) throw ArgumentError("power_loglog is defined with alpha = 1");
            if (mu < 0.0) throw ArgumentError("mu must be nonnegative");
            if (!(lambda > 1.0)) throw ArgumentError("power_loglog needs lambda1 > 1");
            if (!(lambda2 > std::exp(1.0))) throw ArgumentError("power_loglog needs lambda2 > e");
            break;
        case ProfileFamily::table: {
            if (table_r.size() != table_m.size()) throw ArgumentError("table r and m differ in length");
            if (table_r.size() < 2) throw InsufficientDataError("table needs at least two samples");
            for (std::size_t i = 0; i < table_r.size(); ++i) {
                if (!(table_r[i] > 0.0)) throw ArgumentError("table radii must be positive");
                if (!(table_m[i] > 0.0)) throw ArgumentError("table values must be positive");
                if (i > 0 && !(table_r[i] > table_r[i - 1])) throw ArgumentError("table radii must increase");
            }
            break;
        }
    }
}

std::string RadialProfile::describe() const {
    std::ostringstream os;
    os << family_name(family) << "(alpha=" << alpha << ", sigma=" << sigma;
    if (family == ProfileFamily::power_log) os << ", mu=" << mu << ", lambda=" << lambda;
    if (family == ProfileFamily::power_loglog) os << ", mu=" << mu << ", lambda1=" << lambda << ", lambda2=" << lambda2;
    if (family == ProfileFamily::table) os << ", samples=" << table_r.size();
    if (c0) os << ", c0=" << *c0;
    os << ")";
    return os.str();
}

ProfileFamily parse_family(const std::string& s) {
    if (s == "power") return ProfileFamily::power;
    if (s == "power_log") return ProfileFamily::power_log;
    if (s == "power_loglog") return ProfileFamily::power_loglog;
    if (s == "table") return ProfileFamily::table;
    throw ArgumentError("unknown profile family '" + s + "'");
}

std::string family_name(ProfileFamily f) {
    switch (f) {
        case ProfileFamily::power: return "power";
        case ProfileFamily::power_log: return "power_log";
        case ProfileFamily::power_loglog: return "power_loglog";
        case ProfileFamily::table: return "table";
    }
    return "?";
}

double eval_m(const RadialProfile& p, double r) {
    if (r < 0.0 || std::isnan(r)) throw ArgumentError("m is defined for r >= 0");
    if (r == 0.0) return 0.0;
    switch (p.family) {
        case ProfileFamily::power:
            return std::pow(r, p.alpha);
        case ProfileFamily::power_log:
            if (p.mu == 0.0) return std::pow(r, p.alpha);
            return std::pow(r, p.alpha) / std::pow(std::log(p.lambda + r), p.mu);
        case ProfileFamily::power_loglog: {
            const double ll = std::log(std::log(p.lambda2 + r));
            return r / (std::log(p.lambda + r) * std::pow(ll, p.mu));
        }
        case ProfileFamily::table:
            return table_eval(p, r);
    }
    return 0.0;
}

double eval_dm(const RadialProfile& p, double r) {
    if (!(r > 0.0)) throw ArgumentError("m' is evaluated at r > 0");
    const double m = eval_m(p, r);
    switch (p.family) {
        case ProfileFamily::power:
            return p.alpha * m / r;
        case ProfileFamily::power_log:
            if (p.mu == 0.0) return p.alpha * m / r;
            return m * (p.alpha / r - p.mu / ((p.lambda + r) * std::log(p.lambda + r)));
        case ProfileFamily::power_loglog: {
            const double l1 = std::log(p.lambda + r);
            const double l2 = std::log(p.lambda2 + r);
            return m * (1.0 / r - 1.0 / ((p.lambda + r) * l1) - p.mu / ((p.lambda2 + r) * l2 * std::log(l2)));
        }
        case ProfileFamily::table: {
            const double h = 1e-6 * r;
            const double lo = std::max(p.table_r.front(), r - h);
            const double hi = std::min(p.table_r.back(), r + h);
            return (eval_m(p, hi) - eval_m(p, lo)) / (hi - lo);
        }
    }
    return 0.0;
}

MdecReport check_mdec(const RadialProfile& p, const std::vector<double>& r_grid, double tol) {
    if (r_grid.size() < 3) throw InsufficientDataError("check_mdec needs at least three radii");
    MdecReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (double r : r_grid) {
        if (!(r > 0.0)) throw ArgumentError("check_mdec radii must be positive");
        const double h = 1e-4 * r;
        const double m = eval_m(p, r);
        const double dm = (eval_m(p, r + h) - eval_m(p, r - h)) / (2.0 * h);
        const double ratio = r * dm / m;
        const double margin = std::min(ratio - (p.alpha - p.sigma), p.alpha - ratio);
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_r = r;
        }
    }
    rep.pass = rep.worst_margin >= -tol;
    return rep;
}

MonotoneReport monotone_maps_check(const RadialProfile& p, double beta1, double beta2,
                                   const std::vector<double>& r_grid, double tol) {
    if (beta1 < p.alpha) throw ArgumentError("beta1 must be at least alpha");
    if (beta2 > p.alpha - p.sigma) throw ArgumentError("beta2 must not exceed alpha - sigma");
    if (r_grid.size() < 2) throw InsufficientDataError("monotone_maps_check needs at least two radii");
    MonotoneReport rep;
    auto g = [&](double beta, double r) { return std::pow(r, beta) * eval_m(p, 1.0 / r); };
    for (std::size_t i = 1; i < r_grid.size(); ++i) {
        const double a = r_grid[i - 1], b = r_grid[i];
        if (!(b > a) || !(a > 0.0)) throw ArgumentError("radii must be positive and increasing");
        const double ga = g(beta1, a), gb = g(beta1, b);
        const double up = (ga - gb) / std::max(std::abs(ga), 1e-300);
        if (up > tol) {
            rep.increasing_ok = false;
            if (up > rep.worst_violation) { rep.worst_violation = up; rep.worst_r = b; }
        }
        const double ha = g(beta2, a), hb = g(beta2, b);
        const double down = (hb - ha) / std::max(std::abs(ha), 1e-300);
        if (down > tol) {
            rep.decreasing_ok = false;
            if (down > rep.worst_violation) { rep.worst_violation = down; rep.worst_r = b; }
        }
    }
    rep.pass = rep.increasing_ok && rep.decreasing_ok;
    return rep;
}

double kernel_value(const KernelSpec& spec, double r) {
    if (!(r > 0.0)) throw ArgumentError("kernel is evaluated at r > 0");
    return spec.scale * eval_m(spec.profile, 1.0 / r) / std::pow(r, spec.d);
}

double fractional_laplacian_scale(int d, double alpha) {
    if (d < 1 || !(alpha > 0.0 && alpha < 2.0)) throw ArgumentError("fractional Laplacian scale needs 0 < alpha < 2");
    return std::pow(2.0, alpha) * std::tgamma(0.5 * (d + alpha)) /
           (std::pow(kPi, 0.5 * d) * std::abs(std::tgamma(-0.5 * alpha)));
}

LevyOperator symbol_from_multiplier(const RadialProfile& p, const PeriodicGrid& g) {
    LevyOperator op{g, std::vector<double>(g.size()), SymbolProvenance::multiplier};
    for (std::size_t i = 0; i < g.size(); ++i) op.symbol[i] = eval_m(p, g.kmag(i));
    return op;
}

LevyOperator zero_operator(const PeriodicGrid& g) {
    return LevyOperator{g, std::vector<double>(g.size(), 0.0), SymbolProvenance::multiplier};
}

namespace {

// int_R^inf g(r) exp(i(w r + phi)) dr by three rounds of integration by parts,
// with derivatives of g from central differences.
std::complex<double> oscillatory_tail(const std::function<double(double)>& g, double R, double w, double phi) {
    const double h = 1e-3 * R;
    const double g0 = g(R);
    const double g1 = (g(R + h) - g(R - h)) / (2.0 * h);
    const double g2 = (g(R + h) - 2.0 * g0 + g(R - h)) / (h * h);
    const std::complex<double> iw(0.0, w);
    const std::complex<double> e = std::exp(std::complex<double>(0.0, w * R + phi));
    return -e * (g0 / iw - g1 / (iw * iw) + g2 / (iw * iw * iw));
}

double one_minus_cos(double s) {
    if (std::abs(s) < 1e-3) {
        const double s2 = s * s;
        return s2 * (0.5 - s2 / 24.0 + s2 * s2 / 720.0);
    }
    const double t = std::sin(0.5 * s);
    return 2.0 * t * t;
}

double one_minus_j0(double s) {
    if (std::abs(s) < 1e-2) {
        const double s2 = s * s;
        return s2 / 4.0 - s2 * s2 / 64.0 + s2 * s2 * s2 / 2304.0;
    }
    return 1.0 - std::cyl_bessel_j(0.0, s);
}

}  // namespace

SymbolValue symbol_from_kernel(const KernelSpec& spec, const std::vector<double>& zeta, const QuadratureParams& q) {
    if (spec.d != 1 && spec.d != 2) throw ArgumentError("kernel quadrature supports d = 1, 2");
    if (static_cast<int>(zeta.size()) != spec.d) throw ArgumentError("zeta has the wrong dimension");
    double z = 0.0;
    for (double c : zeta) z += c * c;
    z = std::sqrt(z);
    if (z == 0.0) return {};
    const double s0 = std::min(1.0, 1.0 / z);
    auto K = [&](double r) { return kernel_value(spec, r); };
    SymbolValue out;

    if (spec.d == 1) {
        // A = 2 int_0^inf (1 - cos(z r)) K(r) dr
        QuadResult inner = integrate_from_zero([&](double r) { return one_minus_cos(z * r) * K(r); }, s0, q);
        QuadResult mass = integrate_to_infinity(K, s0, q);
        const double period = 2.0 * kPi / z;
        const int n = 64;
        double osc = 0.0, oscerr = 0.0;
        QuadratureParams pq = q;
        for (int j = 0; j < n; ++j) {
            const double a = s0 + j * period;
            QuadResult r = integrate([&](double x) { return std::cos(z * x) * K(x); }, a, a + period, pq);
            osc += r.value;
            oscerr += r.error;
        }
        const double R = s0 + n * period;
        osc += oscillatory_tail(K, R, z, 0.0).real();
        out.value = 2.0 * (inner.value + mass.value - osc);
        out.error = 2.0 * (inner.error + mass.error + oscerr);
        return out;
    }

    // d = 2: A = 2 pi int_0^inf K(r) r (1 - J0(z r)) dr
    auto Kr = [&](double r) { return K(r) * r; };
    QuadResult inner = integrate_from_zero([&](double r) { return one_minus_j0(z * r) * Kr(r); }, s0, q);
    QuadResult mass = integrate_to_infinity(Kr, s0, q);
    const double half = kPi / z;
    const int n = 128;
    double osc = 0.0, oscerr = 0.0;
    for (int j = 0; j < n; ++j) {
        const double a = s0 + j * half;
        QuadResult r = integrate([&](double x) { return std::cyl_bessel_j(0.0, z * x) * Kr(x); }, a, a + half, q);
        osc += r.value;
        oscerr += r.error;
    }
    const double R = s0 + n * half;
    // J0(s) ~ sqrt(2/(pi s)) [cos(s - pi/4) + sin(s - pi/4)/(8 s)]
    auto g_main = [&](double r) { return Kr(r) * std::sqrt(2.0 / (kPi * z * r)); };
    auto g_corr = [&](double r) { return g_main(r) / (8.0 * z * r); };
    osc += oscillatory_tail(g_main, R, z, -0.25 * kPi).real();
    osc += oscillatory_tail(g_corr, R, z, -0.25 * kPi).imag();
    out.value = 2.0 * kPi * (inner.value + mass.value - osc);
    out.error = 2.0 * kPi * (inner.error + mass.error + oscerr);
    return out;
}

LevyOperator symbol_table_from_kernel(const KernelSpec& spec, const PeriodicGrid& g, const QuadratureParams& q) {
    if (spec.d != g.d()) throw ArgumentError("kernel dimension does not match the grid");
    LevyOperator op{g, std::vector<double>(g.size(), 0.0), SymbolProvenance::kernel_quadrature};
    // The symbol is radial, so evaluate once per distinct |k|^2.
    std::vector<std::pair<long, std::size_t>> order;
    order.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        int k1, k2;
        g.wavevector(i, k1, k2);
        order.emplace_back(static_cast<long>(k1) * k1 + static_cast<long>(k2) * k2, i);
    }
    std::sort(order.begin(), order.end());
    long last = -1;
    double val = 0.0;
    for (const auto& [k2sum, idx] : order) {
        if (k2sum != last) {
            last = k2sum;
            std::vector<double> zeta(spec.d, 0.0);
            zeta[0] = std::sqrt(static_cast<double>(k2sum));
            val = symbol_from_kernel(spec, zeta, q).value;
        }
        op.symbol[idx] = val;
    }
    return op;
}

void write_symbol_csv(const LevyOperator& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot open " + path);
    out << std::setprecision(17);
    out << (op.d() == 1 ? "k,symbol\n" : "k1,k2,symbol\n");
    for (std::size_t i = 0; i < op.grid.size(); ++i) {
        int k1, k2;
        op.grid.wavevector(i, k1, k2);
        if (op.d() == 1) out << k1 << ',' << op.symbol[i] << '\n';
        else out << k1 << ',' << k2 << ',' << op.symbol[i] << '\n';
    }
}

KernelSample kernel_from_multiplier(const RadialProfile& p, const std::vector<double>& radii, double zeta_max) {
    if (radii.empty()) throw InsufficientDataError("no radii requested");
    if (!(zeta_max > 0.0)) throw ArgumentError("zeta_max must be positive");
    for (double r : radii) {
        if (!(r > 0.0)) throw ArgumentError("radii must be positive");
        if (r * zeta_max < 64.0) throw ResolutionError("radius below 64 / zeta_max cannot be resolved");
    }
    const double zh = 0.5 * zeta_max;
    auto W = [&](double z) {
        if (z <= zh) return 1.0;
        return 0.5 * (1.0 + std::cos(kPi * (z - zh) / zh));
    };
    auto dW = [&](double z) {
        if (z <= zh) return 0.0;
        return -0.5 * kPi / zh * std::sin(kPi * (z - zh) / zh);
    };
    auto dmW = [&](double z) {
        if (z <= 0.0) return 0.0;
        return eval_dm(p, z) * W(z) + eval_m(p, z) * dW(z);
    };

    KernelSample out;
    out.radii = radii;
    QuadratureParams q;
    q.rel_tol = 1e-11;
    for (double r : radii) {
        const double half = kPi / r;
        double acc = 0.0;
        double a = 0.0;
        while (a < zeta_max) {
            double b = std::min(a + half, zeta_max);
            // keep the window kink on a panel boundary
            if (a < zh && b > zh) b = zh;
            QuadratureParams pq = q;
            pq.abs_tol = 1e-14 * std::max(std::abs(acc), 1e-300);
            acc += integrate([&](double z) { return dmW(z) * std::sin(z * r); }, a, b, pq).value;
            a = b;
        }
        out.K.push_back(acc / (kPi * r));
    }
    out.max_K = *std::max_element(out.K.begin(), out.K.end());
    out.min_K = *std::min_element(out.K.begin(), out.K.end());
    out.nonnegative = out.min_K >= 0.0;
    for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
        const double a = out.K[i], b = out.K[i + 1];
        if (a > 0.0 && b > 0.0) {
            out.decay_exponent.push_back(std::log(b / a) / std::log(radii[i + 1] / radii[i]));
        } else {
            out.decay_exponent.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    out.c5 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        if (p.c0 && r > *p.c0) continue;
        out.c5 = std::min(out.c5, out.K[i] * r / eval_m(p, 1.0 / r));
    }
    if (!std::isfinite(out.c5)) out.c5 = 0.0;
    return out;
}

SymbolFit symbol_lower_bound_fit(const LevyOperator& op, double alpha, double sigma, double noise_floor) {
    const double gamma = alpha - sigma;
    if (!(gamma > 0.0)) throw ArgumentError("alpha - sigma must be positive");
    const PeriodicGrid& g = op.grid;
    double kmax = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) kmax = std::max(kmax, g.kmag(i));
    if (kmax == 0.0) throw InsufficientDataError("grid has no nonzero modes");
    SymbolFit fit;
    fit.C_low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double k = g.kmag(i);
        if (k <= 0.5 * kmax) continue;
        fit.C_low = std::min(fit.C_low, op.symbol[i] / std::pow(k, gamma));
    }
    if (!(fit.C_low > 0.0)) throw ArgumentError("symbol is not positive on the top octave");
    double off = 0.0;
    double pure = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double k = g.kmag(i);
        if (k == 0.0) continue;
        const double kg = std::pow(k, gamma);
        off = std::max(off, fit.C_low * kg - op.symbol[i]);
        pure = std::min(pure, op.symbol[i] / std::pow(k, alpha));
    }
    if (off <= noise_floor * fit.C_low * std::pow(kmax, gamma)) off = 0.0;
    fit.C_off = off;
    fit.pure_power_form = pure > 0.0 && (fit.C_off == 0.0);
    return fit;
}

}  // namespace ddl
