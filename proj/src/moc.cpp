#include "ddl/moc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "ddl/errors.hpp"
#include "ddl/quadrature.hpp"

namespace ddl {
namespace {

// m(1/eta), the integrand of the log-type branch.
double minv(const RadialProfile& p, double eta) { return eval_m(p, 1.0 / eta); }

// d/d xi of m(1/xi) = -m'(1/xi) / xi^2
double dminv(const RadialProfile& p, double xi) { return -eval_dm(p, 1.0 / xi) / (xi * xi); }

QuadratureParams tight() {
    QuadratureParams q;
    q.rel_tol = 1e-13;
    q.abs_tol = 0.0;
    return q;
}

}  // namespace

MocIntegralCache::MocIntegralCache(const RadialProfile& p, double delta, double xi_max, int nodes)
    : p_(p), delta_(delta) {
    if (!(delta > 0.0)) throw ArgumentError("delta must be positive");
    if (nodes < 2) throw ArgumentError("cache needs at least two nodes");
    if (!(xi_max > delta * 1.001)) xi_max = 2.0 * delta;
    xi_max_ = xi_max;
    if (p.family == ProfileFamily::power) return;  // closed form
    // nodes over [delta, xi_max], then a coarser run out to 1e8 xi_max for the
    // far arguments reached by the criterion integrals
    const int far = nodes / 2;
    xs_.resize(nodes + far);
    const double L = std::log(xi_max / delta);
    for (int j = 0; j < nodes; ++j) xs_[j] = delta * std::exp(L * j / (nodes - 1));
    xs_[nodes - 1] = xi_max;
    for (int j = 1; j <= far; ++j) xs_[nodes - 1 + j] = xi_max * std::exp(std::log(1e8) * j / far);
    xs_.pop_back();
    is_.resize(xs_.size());
    fs_.resize(xs_.size());
    for (std::size_t j = 0; j < xs_.size(); ++j) fs_[j] = minv(p, xs_[j]);
    is_[0] = 0.0;
    const auto q = tight();
    for (std::size_t j = 1; j < xs_.size(); ++j) {
        is_[j] = is_[j - 1] + integrate([&](double e) { return minv(p_, e); }, xs_[j - 1], xs_[j], q).value;
    }
}

double MocIntegralCache::operator()(double xi) const {
    if (xi == delta_) return 0.0;
    if (p_.family == ProfileFamily::power) {
        const double a = p_.alpha;
        if (a == 1.0) return std::log(xi / delta_);
        return (std::pow(xi, 1.0 - a) - std::pow(delta_, 1.0 - a)) / (1.0 - a);
    }
    const auto q = tight();
    if (xi < delta_) return -integrate([&](double e) { return minv(p_, e); }, xi, delta_, q).value;
    if (xi >= xs_.back()) {
        return is_.back() + integrate_tail(xi);
    }
    auto it = std::upper_bound(xs_.begin(), xs_.end(), xi);
    const std::size_t j = static_cast<std::size_t>(it - xs_.begin()) - 1;
    const double x0 = xs_[j], x1 = xs_[j + 1], h = x1 - x0;
    const double t = (xi - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * is_[j] + (t3 - 2 * t2 + t) * h * fs_[j] + (-2 * t3 + 3 * t2) * is_[j + 1] +
           (t3 - t2) * h * fs_[j + 1];
}

double MocIntegralCache::integrate_tail(double xi) const {
    if (xi == xs_.back()) return 0.0;
    return integrate([&](double e) { return minv(p_, e); }, xs_.back(), xi, tight()).value;
}

Moc::Moc(MocFamily family, const MocParams& params, double xi0, double cache_max)
    : family_(family), p_(params), xi0_(xi0) {
    const auto& p = p_;
    p.profile.validate();
    if (!(p.kappa > 0.0) || !(p.gamma > 0.0) || !(p.delta > 0.0)) {
        throw ArgumentError("kappa, gamma and delta must be positive");
    }
    if (!(p.beta > 0.0 && p.beta < 1.0)) throw ArgumentError("beta must lie in (0, 1)");
    if (family == MocFamily::stationary) {
        if (!(p.c_cut > p.delta)) throw ArgumentError("c_cut must exceed delta");
        xi0_ = 0.0;
    } else {
        p_.c_cut = std::numeric_limits<double>::infinity();
        if (xi0_ < 0.0) xi0_ = 0.0;
    }
    md_ = minv(p.profile, p.delta);
    double top = cache_max;
    if (!(top > 0.0)) top = 1e4 * std::max({p.delta, p.A0, xi0_});
    if (std::isfinite(p_.c_cut)) top = p_.c_cut;
    cache_ = std::make_shared<MocIntegralCache>(p.profile, p.delta, top);
}

Moc Moc::with_xi0(double xi0) const {
    Moc m = *this;
    m.xi0_ = family_ == MocFamily::eventual ? std::max(0.0, xi0) : 0.0;
    return m;
}

double Moc::integral(double xi) const { return (*cache_)(xi); }

double Moc::omega(double xi) const { return eval(xi).value; }

double Moc::omega_zero_plus() const {
    if (family_ == MocFamily::stationary || xi0_ <= 0.0) return 0.0;
    const double k = p_.kappa, b = p_.beta, d = p_.delta, g = p_.gamma;
    if (xi0_ > d) {
        return (1.0 - b) * k * md_ * d + g * integral(xi0_) - g * minv(p_.profile, xi0_) * (xi0_ - d);
    }
    return (1.0 - b) * k * md_ * std::pow(d, 1.0 - b) * std::pow(xi0_, b);
}

MocEval Moc::eval(double xi) const {
    if (!(xi > 0.0)) throw ArgumentError("omega is evaluated at xi > 0");
    const double k = p_.kappa, b = p_.beta, d = p_.delta, g = p_.gamma;
    const auto& prof = p_.profile;
    MocEval e;

    auto power_part = [&](double x, MocEval& r) {
        const double c = k * md_ * std::pow(d, 1.0 - b);
        r.value = c * std::pow(x, b);
        r.d_minus = r.d_plus = c * b * std::pow(x, b - 1.0);
        r.d2_minus = r.d2_plus = -c * b * (1.0 - b) * std::pow(x, b - 2.0);
    };
    auto log_part = [&](double x, MocEval& r) {
        r.value = k * md_ * d + g * integral(x);
        r.d_minus = r.d_plus = g * minv(prof, x);
        r.d2_minus = r.d2_plus = g * dminv(prof, x);
    };

    const bool stationary_shape = family_ == MocFamily::stationary || xi0_ <= 0.0;
    if (stationary_shape) {
        const double c = p_.c_cut;
        if (xi < d) {
            power_part(xi, e);
        } else if (xi == d) {
            MocEval lo, hi;
            power_part(d, lo);
            log_part(d, hi);
            e.value = k * md_ * d;
            e.d_minus = lo.d_minus;
            e.d2_minus = lo.d2_minus;
            e.d_plus = hi.d_plus;
            e.d2_plus = hi.d2_plus;
        } else if (xi < c) {
            log_part(xi, e);
        } else {
            log_part(c, e);
            if (xi == c) {
                e.d_plus = 0.0;
                e.d2_plus = 0.0;
            } else {
                e.d_minus = e.d_plus = e.d2_minus = e.d2_plus = 0.0;
            }
        }
        return e;
    }

    const double x0 = xi0_;
    if (x0 > d) {
        const double I0 = integral(x0);
        const double m0 = minv(prof, x0);
        const double dm0 = eval_dm(prof, 1.0 / x0);  // m'(1/xi0)
        const double base = k * md_ * d + g * I0 - g * m0 * x0;
        if (xi <= d) {
            e.value = (1.0 - b) * k * md_ * d + g * I0 - g * m0 * (x0 - d) + b * k * md_ * xi;
            e.d_minus = e.d_plus = b * k * md_;
            e.d_xi0 = g * dm0 / (x0 * x0) * (x0 - d);
            if (xi == d) e.d_plus = g * m0;
        } else if (xi <= x0) {
            e.value = base + g * m0 * xi;
            e.d_minus = e.d_plus = g * m0;
            e.d_xi0 = g * dm0 / (x0 * x0) * (x0 - xi);
            if (xi == x0) e.d2_plus = g * dminv(prof, x0);
        } else {
            log_part(xi, e);
        }
        return e;
    }

    // 0 < xi0 <= delta
    const double c = k * md_ * std::pow(d, 1.0 - b);
    if (xi <= x0) {
        e.value = (1.0 - b) * c * std::pow(x0, b) + b * c * std::pow(x0, b - 1.0) * xi;
        e.d_minus = e.d_plus = b * c * std::pow(x0, b - 1.0);
        e.d_xi0 = b * (1.0 - b) * c * std::pow(x0, b - 1.0) * (1.0 - xi / x0);
        if (xi == x0) {
            e.d2_plus = -c * b * (1.0 - b) * std::pow(x0, b - 2.0);
            if (x0 == d) {
                e.d_plus = g * md_;
                e.d2_plus = g * dminv(prof, d);
            }
        }
    } else if (xi < d) {
        power_part(xi, e);
    } else if (xi == d) {
        MocEval lo, hi;
        power_part(d, lo);
        log_part(d, hi);
        e.value = k * md_ * d;
        e.d_minus = lo.d_minus;
        e.d2_minus = lo.d2_minus;
        e.d_plus = hi.d_plus;
        e.d2_plus = hi.d2_plus;
    } else {
        log_part(xi, e);
    }
    return e;
}

ShapeReport validate_shape(const Moc& moc, const std::vector<double>& xi, double tol) {
    if (xi.size() < 3) throw InsufficientDataError("validate_shape needs at least three points");
    ShapeReport rep;
    std::vector<double> w(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (!(xi[i] > 0.0) || (i > 0 && !(xi[i] > xi[i - 1]))) {
            throw ArgumentError("xi grid must be positive and increasing");
        }
        w[i] = moc.omega(xi[i]);
    }
    const double beta = moc.params().beta;
    auto flag = [&](bool& which, double amount, double at) {
        which = false;
        if (amount > rep.worst) {
            rep.worst = amount;
            rep.worst_xi = at;
        }
    };
    double prev_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < xi.size(); ++i) {
        const double scale = std::max(std::abs(w[i]), 1e-300);
        const double drop = (w[i - 1] - w[i]) / scale;
        if (drop > tol) flag(rep.monotone, drop, xi[i]);
        const double slope = (w[i] - w[i - 1]) / (xi[i] - xi[i - 1]);
        // rounding in w differences sets a floor relative to omega / spacing
        const double floor = 1e-13 * scale / (xi[i] - xi[i - 1]);
        if (std::isfinite(prev_slope)) {
            const double rise = slope - prev_slope;
            const double allow = tol * std::max(std::abs(slope), std::abs(prev_slope)) + floor;
            if (rise > allow) flag(rep.concave, rise / std::max(std::abs(prev_slope), 1e-300), xi[i]);
        }
        prev_slope = slope;
        const double r0 = w[i - 1] / std::pow(xi[i - 1], beta), r1 = w[i] / std::pow(xi[i], beta);
        const double grow = (r1 - r0) / std::max(std::abs(r0), 1e-300);
        if (grow > tol) flag(rep.holder_ratio, grow, xi[i]);
    }
    const MocEval at = moc.eval(moc.params().delta);
    if (at.d_minus < at.d_plus * (1.0 - tol)) {
        flag(rep.jump_sign, (at.d_plus - at.d_minus) / std::max(at.d_plus, 1e-300), moc.params().delta);
    }
    rep.pass = rep.monotone && rep.concave && rep.holder_ratio && rep.jump_sign;
    return rep;
}

bool Coefficients::all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const Inequality& q) { return q.holds(); });
}

namespace {

enum class Var { kappa, gamma, rho };

struct Bound {
    Var var;
    std::string label;
    double fixed;         // bound value when it does not depend on kappa
    double per_kappa;     // bound = per_kappa * kappa when nonzero
    bool strict;
    double eval(double kappa) const { return per_kappa != 0.0 ? per_kappa * kappa : fixed; }
};

std::vector<Bound> bounds(double a, double s, double b, const CriterionConstants& c, MocFamily family) {
    const double g = a - s;
    const double C1 = c.C1, C2 = c.C2, C0 = c.C0, ct = c.c_tilde;
    std::vector<Bound> out;
    auto K = [&](std::string l, double v, bool strict = true) { out.push_back({Var::kappa, l, v, 0.0, strict}); };
    auto G = [&](std::string l, double v, bool strict = true) { out.push_back({Var::gamma, l, v, 0.0, strict}); };
    auto GK = [&](std::string l, double f, bool strict = true) { out.push_back({Var::gamma, l, 0.0, f, strict}); };
    auto R = [&](std::string l, double v, bool strict = true) { out.push_back({Var::rho, l, v, 0.0, strict}); };

    const bool third = c.kcase == KernelCase::III || family == MocFamily::eventual;
    const double Cs = third ? C2 : C2 + c.C2p;
    const double dk = third ? 32.0 : 64.0;
    const double dg = third ? 8.0 : 16.0;
    K("kappa < 1/(2 C2 beta)", 1.0 / (2.0 * C2 * b));
    K("kappa < C1 (1-beta)^2 / (" + std::to_string(int(dk)) + " C2sum)", C1 * (1 - b) * (1 - b) / (dk * Cs));
    GK("gamma < beta kappa", b);
    GK("gamma < kappa / 2", 0.5);
    G("gamma < 1/(2 C2)", 1.0 / (2.0 * C2));
    G("gamma < C1 ct^2 (1-beta)(alpha-sigma) / (" + std::to_string(int(dg)) + " C2sum)",
      C1 * ct * ct * (1 - b) * g / (dg * Cs));
    if (family == MocFamily::stationary) return out;

    // far tangency, xi0 >= N delta
    R("rho < C1 (alpha-sigma) / (2 alpha^2)", C1 * g / (2 * a * a));
    K("kappa < 1/(4 C2 beta)", 1.0 / (4 * C2 * b));
    K("kappa < C1 / (4 C2 beta alpha)", C1 / (4 * C2 * b * a));
    K("kappa < C1 (alpha-sigma)^2 / (2 C2 (C0+1) beta alpha)", C1 * g * g / (2 * C2 * (C0 + 1) * b * a));
    K("kappa < C1 (1-beta) / (C2 (C0+2) beta^2 alpha)", C1 * (1 - b) / (C2 * (C0 + 2) * b * b * a));
    // near tangency, delta < xi0 <= N delta
    R("rho < C1 (1-beta)(alpha-sigma) / (24 alpha^2)", C1 * (1 - b) * g / (24 * a * a));
    K("kappa < C1 (1-beta) / (6 C2 (C0+2) beta^2 alpha)", C1 * (1 - b) / (6 * C2 * (C0 + 2) * b * b * a));
    GK("gamma <= (1-beta)(alpha-sigma) kappa / 8", (1 - b) * g / 8, false);
    G("gamma <= C1 (1-beta)(alpha-sigma)^2 / (24 C2 (C0+1) beta alpha)",
      C1 * (1 - b) * g * g / (24 * C2 * (C0 + 1) * b * a), false);
    // middle region, xi between delta and xi0
    G("gamma < 1/(4 C2)", 1.0 / (4 * C2));
    G("gamma < C1 / (4 C2 alpha)", C1 / (4 * C2 * a));
    G("gamma < C1 (1-beta) / (2 C2 beta alpha)", C1 * (1 - b) / (2 * C2 * b * a));
    G("gamma < C1 (alpha-sigma)^2 / (2 C2 (C0+3) alpha)", C1 * g * g / (2 * C2 * (C0 + 3) * a));
    G("gamma <= C1 (alpha-sigma) / (2 C2 (C0+3) alpha)", C1 * g / (2 * C2 * (C0 + 3) * a), false);
    // outer region, xi > xi0 > delta
    G("gamma < C1 ct^2 (alpha-sigma)^2 / (6 C2 alpha)", C1 * ct * ct * g * g / (6 * C2 * a));
    G("gamma < ct (1-beta)(alpha-sigma)^2 / (8 alpha)", ct * (1 - b) * g * g / (8 * a));
    GK("gamma < kappa", 1.0);
    // xi0 <= delta
    R("rho < C1 / (2 alpha beta)", C1 / (2 * a * b));
    K("kappa < C1 (1-beta)^2 / (2 C2 (2 + C0 beta) beta alpha)", C1 * (1 - b) * (1 - b) / (2 * C2 * (2 + C0 * b) * b * a));
    K("kappa < 1/(2 C2)", 1.0 / (2 * C2));
    K("kappa < C1 (1-beta)^2 / (192 C2)", C1 * (1 - b) * (1 - b) / (192 * C2));
    GK("gamma <= kappa", 1.0, false);
    // positivity of omega(0+) and the derivative jump
    GK("gamma < (1-beta) kappa", 1 - b);
    return out;
}

void check_beta(double alpha, double sigma, double beta) {
    if (!(alpha > 0.0 && alpha <= 1.0) || !(sigma >= 0.0 && sigma < alpha)) {
        throw ArgumentError("need 0 < alpha <= 1 and 0 <= sigma < alpha");
    }
    if (!(beta > 1.0 - alpha + sigma && beta < 1.0)) throw ArgumentError("beta must lie in (1 - alpha + sigma, 1)");
}

}  // namespace

std::vector<Inequality> coefficient_conditions(double alpha, double sigma, double beta, const CriterionConstants& c,
                                               MocFamily family, double kappa, double gamma, double rho) {
    check_beta(alpha, sigma, beta);
    std::vector<Inequality> out;
    for (const auto& b : bounds(alpha, sigma, beta, c, family)) {
        const double v = b.var == Var::kappa ? kappa : b.var == Var::gamma ? gamma : rho;
        out.push_back({b.label, v, b.eval(kappa), b.strict});
    }
    return out;
}

Coefficients select_coefficients(double alpha, double sigma, double beta, const CriterionConstants& c,
                                 MocFamily family) {
    check_beta(alpha, sigma, beta);
    if (family == MocFamily::eventual && c.kcase != KernelCase::III) {
        throw ArgumentError("eventual-family coefficients are derived for Case III kernels");
    }
    if (!(c.C1 > 0.0) || !(c.C2 > 0.0)) throw ArgumentError("C1 and C2 must be positive");
    const auto bs = bounds(alpha, sigma, beta, c, family);
    Coefficients out;
    out.kappa_max = std::numeric_limits<double>::infinity();
    for (const auto& b : bs) {
        if (b.var == Var::kappa) out.kappa_max = std::min(out.kappa_max, b.fixed);
    }
    out.kappa = 0.5 * out.kappa_max;
    out.gamma_max = std::numeric_limits<double>::infinity();
    for (const auto& b : bs) {
        if (b.var == Var::gamma) out.gamma_max = std::min(out.gamma_max, b.eval(out.kappa));
    }
    out.gamma = 0.5 * out.gamma_max;
    if (family == MocFamily::eventual) {
        out.rho_max = std::numeric_limits<double>::infinity();
        for (const auto& b : bs) {
            if (b.var == Var::rho) out.rho_max = std::min(out.rho_max, b.fixed);
        }
        out.rho = 0.5 * out.rho_max;
    }
    out.checks = coefficient_conditions(alpha, sigma, beta, c, family, out.kappa, out.gamma, out.rho);
    return out;
}

double xi0_closed_form(double A0, double alpha, double rho, double t) {
    const double base = std::pow(A0, alpha) - alpha * rho * t;
    return base > 0.0 ? std::pow(base, 1.0 / alpha) : 0.0;
}

double xi0_solve(const MocParams& params, double t, bool force_ode) {
    if (!(params.A0 > 0.0)) throw ArgumentError("A0 must be positive");
    if (!(params.rho > 0.0)) throw ArgumentError("rho must be positive");
    if (t < 0.0) throw ArgumentError("t must be nonnegative");
    const auto& p = params.profile;
    if (p.family == ProfileFamily::power && !force_ode) return xi0_closed_form(params.A0, p.alpha, params.rho, t);
    if (t == 0.0) return params.A0;

    using namespace boost::numeric::odeint;
    using State = std::array<double, 1>;
    const double floor = 1e-14 * params.A0;
    auto rhs = [&](const State& x, State& dx, double) {
        dx[0] = x[0] > floor ? -params.rho * eval_m(p, 1.0 / x[0]) * x[0] : 0.0;
    };
    State x{params.A0};
    auto stepper = make_controlled(1e-13, 1e-13, runge_kutta_dopri5<State>());
    double tc = 0.0;
    double dt = 1e-3 * t;
    // Stop stepping once xi0 is numerically zero; the flow reaches 0 in finite
    // time for divergent-speed profiles and stays there.
    while (tc < t && x[0] > floor) {
        if (tc + dt > t) dt = t - tc;
        State trial = x;
        double tt = tc, h = dt;
        if (stepper.try_step(rhs, trial, tt, h) == success) {
            if (!(trial[0] > floor) || !std::isfinite(trial[0])) {
                if (dt < 1e-15 * std::max(t, 1.0)) return 0.0;
                dt *= 0.25;
                continue;
            }
            x = trial;
            tc = tt;
            dt = h;
        } else {
            dt = h;
        }
    }
    return x[0] > floor ? x[0] : 0.0;
}

T1Report eventual_time_t1(const MocParams& params, std::optional<double> theta_linf, std::optional<double> C) {
    const auto& p = params.profile;
    if (!(params.A0 > 0.0) || !(params.rho > 0.0)) throw ArgumentError("A0 and rho must be positive");
    T1Report r;
    r.t1_est = 1.0 / ((p.alpha - p.sigma) * params.rho * eval_m(p, 1.0 / params.A0));
    if (p.family == ProfileFamily::power && p.sigma == 0.0) {
        r.power_law_closed = true;
        r.t1_closed = std::pow(params.A0, p.alpha) / (p.alpha * params.rho);
        r.t1_est = r.t1_closed;
        if (theta_linf && C && p.alpha < 1.0) {
            const double a = p.alpha;
            r.t1_explicit = *C / (1.0 - params.beta) * std::pow(4.0 * (1.0 - a) / (a * params.gamma), a / (1.0 - a)) *
                            std::pow(*theta_linf, a / (1.0 - a));
        }
    }
    return r;
}

double holder_cap(const MocParams& params) {
    return params.kappa * eval_m(params.profile, 1.0 / params.delta) * std::pow(params.delta, 1.0 - params.beta);
}

ObeyReport obeys_moc(const Field& f, const Moc& moc, int stride, double slack) {
    const PeriodicGrid& g = f.grid();
    const int N = g.N();
    if (stride < 1 || N % stride != 0) throw ArgumentError("stride must divide N");
    for (double v : f.values()) {
        if (!std::isfinite(v)) throw ArgumentError("field must be finite");
    }
    const int M = N / stride;
    const double h = g.h() * stride;
    const auto& v = f.values();
    ObeyReport rep;
    auto axis = [&](int o) { return std::min(o, M - o) * h; };
    if (g.d() == 1) {
        std::vector<double> w(M, 0.0);
        for (int o = 1; o < M; ++o) w[o] = moc.omega(axis(o));
        for (int i = 0; i < M; ++i) {
            for (int o = 1; o <= M / 2; ++o) {
                const int j = (i + o) % M;
                const double r = std::abs(v[std::size_t(i) * stride] - v[std::size_t(j) * stride]) / w[o];
                if (r > rep.worst_ratio) {
                    rep.worst_ratio = r;
                    rep.worst_i = std::size_t(i) * stride;
                    rep.worst_j = std::size_t(j) * stride;
                    rep.worst_dist = axis(o);
                }
            }
        }
    } else {
        std::vector<double> w(std::size_t(M) * M, 0.0);
        for (int o1 = 0; o1 < M; ++o1) {
            for (int o2 = 0; o2 < M; ++o2) {
                if (o1 == 0 && o2 == 0) continue;
                w[std::size_t(o1) * M + o2] = moc.omega(std::hypot(axis(o1), axis(o2)));
            }
        }
        for (int i1 = 0; i1 < M; ++i1) {
            for (int i2 = 0; i2 < M; ++i2) {
                const std::size_t a = std::size_t(i1) * stride * N + std::size_t(i2) * stride;
                const double va = v[a];
                // offsets in the half plane o1 > 0, or o1 == 0 and o2 > 0, cover each pair once
                for (int o1 = 0; o1 <= M / 2; ++o1) {
                    const int j1 = (i1 + o1) % M;
                    for (int o2 = (o1 == 0 ? 1 : 0); o2 < M; ++o2) {
                        if (o1 == 0 && o2 > M / 2) break;
                        const int j2 = (i2 + o2) % M;
                        const std::size_t b = std::size_t(j1) * stride * N + std::size_t(j2) * stride;
                        const double r = std::abs(va - v[b]) / w[std::size_t(o1) * M + o2];
                        if (r > rep.worst_ratio) {
                            rep.worst_ratio = r;
                            rep.worst_i = a;
                            rep.worst_j = b;
                            rep.worst_dist = std::hypot(axis(o1), axis(o2));
                        }
                    }
                }
            }
        }
    }
    rep.pass = rep.worst_ratio < 1.0 + slack;
    return rep;
}

std::optional<bool> integral_diverges(const RadialProfile& p) {
    switch (p.family) {
        case ProfileFamily::power: return p.alpha == 1.0;
        case ProfileFamily::power_log: return p.alpha == 1.0 && p.mu <= 1.0;
        case ProfileFamily::power_loglog: return p.mu <= 1.0;
        case ProfileFamily::table: return std::nullopt;
    }
    return std::nullopt;
}

namespace {

int auto_stride(const PeriodicGrid& g) {
    const double pts = static_cast<double>(g.size());
    int s = 1;
    while (pts / std::pow(double(s), g.d()) > 4096.0 && g.N() % (2 * s) == 0) s *= 2;
    return s;
}

}  // namespace

FitResult initial_fit(const Field& theta0, MocFamily family, const RadialProfile& prof, double beta,
                      const Coefficients& coef, double c_cut, int stride) {
    const int st = stride > 0 ? stride : auto_stride(theta0.grid());
    FitResult fr;
    fr.linf = norm_linf(theta0);
    fr.holder = holder_seminorm(theta0, beta, st).value;
    fr.condition_bound = 2.0 * fr.linf;
    MocParams mp;
    mp.kappa = coef.kappa;
    mp.gamma = coef.gamma;
    mp.rho = coef.rho;
    mp.beta = beta;
    mp.profile = prof;
    mp.c_cut = c_cut;
    const double margin = 1.05;

    if (family == MocFamily::stationary) {
        const double dmax = std::isfinite(c_cut) ? 0.5 * c_cut : std::numbers::pi;
        if (fr.linf == 0.0) {
            fr.delta = dmax;
            return fr;
        }
        const double a0 = fr.holder > 0.0 ? std::pow(2.0 * fr.linf / fr.holder, 1.0 / beta) : dmax;
        auto ok = [&](double delta, double& cond) {
            mp.delta = delta;
            Moc m(MocFamily::stationary, mp);
            cond = m.omega(a0);
            if (cond < margin * fr.condition_bound) return false;
            return obeys_moc(theta0, m, st).pass;
        };
        double delta = dmax, cond = 0.0;
        double fail = 0.0;
        for (int it = 0; it < 400; ++it) {
            ++fr.iterations;
            if (ok(delta, cond)) break;
            fail = delta;
            delta *= 0.5;
            if (delta < 1e-12 * dmax) {
                const auto div = integral_diverges(prof);
                if (div && !*div) {
                    throw FitImpossibleError(
                        "stationary fit impossible: int_0 m(1/xi) d xi converges, so omega stays bounded as delta -> 0");
                }
                throw FitImpossibleError("stationary fit did not terminate down to delta = 1e-12 c");
            }
        }
        if (fail > 0.0) {
            double lo = delta, hi = fail;
            for (int it = 0; it < 30; ++it) {
                ++fr.iterations;
                const double mid = std::sqrt(lo * hi);
                double c2 = 0.0;
                if (ok(mid, c2)) lo = mid;
                else hi = mid;
            }
            delta = lo;
        }
        ok(delta, cond);
        fr.delta = delta;
        fr.condition_value = cond;
        return fr;
    }

    const double a = prof.alpha, s = prof.sigma;
    if (!(a - s < 1.0)) throw ArgumentError("the eventual fit needs alpha - sigma < 1");
    if (!(coef.rho > 0.0)) throw ArgumentError("eventual coefficients need rho > 0");
    auto cond_value = [&](double A0, double delta) {
        return (a - s) * mp.gamma / (1.0 - a + s) * eval_m(prof, 1.0 / A0) * std::pow(A0, a - s) *
               (std::pow(A0, 1.0 - a + s) - std::pow(delta, 1.0 - a + s));
    };
    if (prof.family == ProfileFamily::power && s == 0.0) {
        const double L = std::max(fr.linf, 1e-300);
        fr.A0 = std::pow(4.0 * (1.0 - a) / (a * mp.gamma) * L, 1.0 / (1.0 - a));
        fr.delta = std::pow((1.0 - a) / (a * mp.gamma) * L, 1.0 / (1.0 - a));
        fr.closed_form = true;
        fr.condition_value = cond_value(fr.A0, fr.delta);
        return fr;
    }
    const double ratio = std::pow(4.0, -1.0 / (1.0 - a + s));
    auto ok = [&](double A0) {
        const double delta = A0 * ratio;
        if (cond_value(A0, delta) < margin * fr.condition_bound) return false;
        mp.delta = delta;
        mp.A0 = A0;
        Moc m(MocFamily::eventual, mp, A0);
        return obeys_moc(theta0, m, st).pass;
    };
    double A0 = 1e-3;
    double fail = 0.0;
    for (int it = 0;; ++it) {
        ++fr.iterations;
        if (ok(A0)) break;
        fail = A0;
        A0 *= 2.0;
        if (it > 200) throw FitImpossibleError("eventual fit found no admissible A0");
    }
    if (fail > 0.0) {
        double lo = fail, hi = A0;
        for (int it = 0; it < 30; ++it) {
            ++fr.iterations;
            const double mid = std::sqrt(lo * hi);
            if (ok(mid)) hi = mid;
            else lo = mid;
        }
        A0 = hi;
    }
    fr.A0 = A0;
    fr.delta = A0 * ratio;
    fr.condition_value = cond_value(fr.A0, fr.delta);
    return fr;
}

int ncond(double alpha, double sigma) {
    const double g = alpha - sigma;
    if (!(g > 0.0 && g <= 1.0)) throw ArgumentError("need 0 < alpha - sigma <= 1");
    if (g == 1.0) return static_cast<int>(std::floor(std::exp(2.0))) + 1;  // limit of the expression
    return static_cast<int>(std::floor(std::pow((2.0 - g) / g, 1.0 / (1.0 - g)))) + 1;
}

void write_moc_csv(const Moc& moc, const std::vector<double>& xi_grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot open " + path);
    out << std::setprecision(15) << "xi,omega,d_minus,d_plus\n";
    for (double x : xi_grid) {
        const MocEval e = moc.eval(x);
        out << x << ',' << e.value << ',' << e.d_minus << ',' << e.d_plus << '\n';
    }
}

}  // namespace ddl
