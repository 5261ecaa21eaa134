#include "ddl/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "ddl/errors.hpp"
#include "json.hpp"

namespace ddl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sphere_area(int d) { return d == 1 ? 2.0 : 2.0 * kPi; }

// Ktilde(eta) eta / m(1/eta)
double ktilde_ratio(const KernelSpec& spec, double eta, const QuadratureParams& q) {
    const double m = eval_m(spec.profile, 1.0 / eta);
    if (spec.d == 1) return kernel_value(spec, eta) * eta / m;
    auto f = [&](double nu) { return kernel_value(spec, std::hypot(eta, nu)); };
    const double kt = 2.0 * (integrate(f, 0.0, eta, q).value + integrate_to_infinity(f, eta, q).value);
    return kt * eta / m;
}

double omega_at(const Moc& moc, double x) { return x > 0.0 ? moc.omega(x) : moc.omega_zero_plus(); }

std::vector<double> breakpoints(const Moc& moc) {
    std::vector<double> b{moc.params().delta};
    if (moc.family() == MocFamily::eventual && moc.xi0() > 0.0) b.push_back(moc.xi0());
    if (moc.family() == MocFamily::stationary && std::isfinite(moc.params().c_cut)) b.push_back(moc.params().c_cut);
    return b;
}

// Sorted cut points of (lo, hi) with lo and hi included.
std::vector<double> pieces(double lo, double hi, std::vector<double> cuts) {
    std::vector<double> out{lo};
    std::sort(cuts.begin(), cuts.end());
    for (double c : cuts)
        if (c > lo * (1.0 + 1e-12) && c < hi * (1.0 - 1e-12)) out.push_back(c);
    out.push_back(hi);
    return out;
}

double upper_limit(const Moc& moc, const CriterionConstants& c) {
    if (c.kcase == KernelCase::III) return kInf;
    const auto& c0 = moc.params().profile.c0;
    if (!c0) throw ArgumentError("Cases I and II need the profile's c0");
    return 0.5 * *c0;
}

}  // namespace

double comparability_c1(const KernelSpec& spec) {
    if (!(spec.scale > 0.0)) throw ArgumentError("kernel scale must be positive");
    return std::max(spec.scale, 1.0 / spec.scale);
}

double ktilde_ratio_min(const KernelSpec& spec, const std::vector<double>& eta_grid, const QuadratureParams& q) {
    if (eta_grid.empty()) throw InsufficientDataError("empty eta grid");
    double best = kInf;
    for (double eta : eta_grid) best = std::min(best, ktilde_ratio(spec, eta, q));
    return best;
}

CriterionConstants estimate_constants(const KernelSpec& spec, const VelocityModel& model, const QuadratureParams& q) {
    if (spec.d != 1 && spec.d != 2) throw ArgumentError("constants are estimated for d = 1, 2");
    if (model.dim() != spec.d) throw ArgumentError("velocity model and kernel disagree on dimension");
    spec.profile.validate();
    CriterionConstants c;
    c.kcase = spec.kcase;

    double hi = 1e3;
    if (spec.kcase != KernelCase::III) {
        if (!spec.profile.c0) throw ArgumentError("Cases I and II need the profile's c0");
        hi = 0.5 * *spec.profile.c0;
    }
    const double lo = 1e-4 * std::min(1.0, hi);
    std::vector<double> grid;
    const int n = 81;
    for (int i = 0; i < n; ++i) grid.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
    c.C1 = ktilde_ratio_min(spec, grid, q);

    const double c1 = comparability_c1(spec);
    c.C2 = a_norm(model) + 2.0 * c1 * psi_max(model);

    if (spec.kcase == KernelCase::II) {
        const double c0 = *spec.profile.c0;
        const double ta = spec.tilde_alpha;
        if (!(ta > 0.0)) throw ArgumentError("Case II needs tilde_alpha > 0");
        const double tail = sphere_area(spec.d) * std::pow(c0, -ta) / ta;
        c.C1p = 2.0 * spec.c1 * tail;
        c.C2p = 2.0 * spec.c1 * psi_max(model) * tail;
    }
    return c;
}

double dissipation_bound(const Moc& moc, double xi, const CriterionConstants& c, const QuadratureParams& q) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw RangeError("dissipation bound needs finite xi > 0");
    const auto& prof = moc.params().profile;
    const MocEval e = moc.eval(xi);
    const double w = e.value;
    auto weight = [&](double eta) { return eval_m(prof, 1.0 / eta) / eta; };
    const auto bps = breakpoints(moc);

    // Inner: second difference centred at xi. Below eta_t the direct difference
    // loses digits to cancellation, so its two-term expansion is used instead.
    double eta_t = 2e-3 * xi;
    for (double b : bps)
        if (std::abs(b - xi) > 1e-12 * xi) eta_t = std::min(eta_t, 0.25 * std::abs(b - xi));
    auto inner = [&](double eta) {
        double sd;
        if (eta < eta_t)
            sd = 2.0 * eta * (e.d_plus - e.d_minus) + 2.0 * eta * eta * (e.d2_plus + e.d2_minus);
        else
            sd = moc.omega(xi + 2.0 * eta) + omega_at(moc, xi - 2.0 * eta) - 2.0 * w;
        return sd * weight(eta);
    };
    std::vector<double> cuts;
    for (double b : bps) cuts.push_back(0.5 * std::abs(b - xi));
    const auto p1 = pieces(0.0, 0.5 * xi, cuts);
    double I1 = integrate_from_zero(inner, p1[1], q).value;
    for (std::size_t i = 1; i + 1 < p1.size(); ++i) I1 += integrate(inner, p1[i], p1[i + 1], q).value;

    // outer: omega(2 eta + xi) - omega(2 eta - xi) - 2 omega(xi)
    auto outer = [&](double eta) {
        return (moc.omega(2.0 * eta + xi) - omega_at(moc, 2.0 * eta - xi) - 2.0 * w) * weight(eta);
    };
    const double U = upper_limit(moc, c);
    double I2 = 0.0;
    if (U > 0.5 * xi) {
        cuts.clear();
        for (double b : bps) {
            cuts.push_back(0.5 * (b - xi));
            cuts.push_back(0.5 * (b + xi));
        }
        if (std::isfinite(U)) {
            const auto p2 = pieces(0.5 * xi, U, cuts);
            for (std::size_t i = 0; i + 1 < p2.size(); ++i) I2 += integrate(outer, p2[i], p2[i + 1], q).value;
        } else {
            const double last = std::max(*std::max_element(cuts.begin(), cuts.end()), xi) * 2.0;
            const auto p2 = pieces(0.5 * xi, last, cuts);
            for (std::size_t i = 0; i + 1 < p2.size(); ++i) I2 += integrate(outer, p2[i], p2[i + 1], q).value;
            I2 += integrate_to_infinity(outer, last, q).value;
        }
    }

    double D = c.C1 * (I1 + I2);
    if (c.kcase == KernelCase::II) D += c.C1p * w;
    return D;
}

double drift_tail_integral(const Moc& moc, double xi, const QuadratureParams& q) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw RangeError("tail integral needs finite xi > 0");
    auto f = [&](double eta) { return moc.omega(eta) / (eta * eta); };
    const double cc = moc.family() == MocFamily::stationary ? moc.params().c_cut : kInf;
    double I = 0.0;
    if (std::isfinite(cc)) {
        if (xi < cc) {
            const auto p = pieces(xi, cc, breakpoints(moc));
            for (std::size_t i = 0; i + 1 < p.size(); ++i) I += integrate(f, p[i], p[i + 1], q).value;
        }
        I += moc.omega(std::max(xi, cc)) / std::max(xi, cc);
    } else {
        auto bps = breakpoints(moc);
        const double last = std::max(xi, *std::max_element(bps.begin(), bps.end())) * 2.0;
        const auto p = pieces(xi, last, bps);
        for (std::size_t i = 0; i + 1 < p.size(); ++i) I += integrate(f, p[i], p[i + 1], q).value;
        I += integrate_to_infinity(f, last, q).value;
    }
    return xi * I;
}

double drift_bound(const Moc& moc, double xi, const CriterionConstants& c, double D, const QuadratureParams& q) {
    const double m = eval_m(moc.params().profile, 1.0 / xi);
    return -c.C2 * D / m + (c.C2 + c.C2p) * moc.omega(xi) + c.C2 * drift_tail_integral(moc, xi, q);
}

MarginResult criterion_margin(const Moc& base, double xi, double xi0, double epsilon, const CriterionConstants& c,
                              std::optional<double> B0, const QuadratureParams& q) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw RangeError("criterion needs finite xi > 0");
    if (!(epsilon >= 0.0)) throw ArgumentError("epsilon must be nonnegative");
    const Moc moc = base.family() == MocFamily::eventual ? base.with_xi0(xi0) : base;
    const MocEval e = moc.eval(xi);
    if (B0 && e.value > 2.0 * *B0 * (1.0 + 1e-12))
        throw RangeError("omega(xi) exceeds 2 B0; the pair cannot be a breakthrough scenario");

    MarginResult r;
    r.d_omega = std::max(e.d_minus, e.d_plus);
    r.d2_omega = std::max(e.d2_minus, e.d2_plus);
    r.D_bound = dissipation_bound(moc, xi, c, q);
    r.Omega_bound = drift_bound(moc, xi, c, r.D_bound, q);
    const double m = eval_m(moc.params().profile, 1.0 / xi);
    r.substitution_ok = 1.0 - c.C2 * r.d_omega / m > 0.0;
    if (moc.family() == MocFamily::eventual && moc.xi0() > 0.0) {
        const double x0 = moc.xi0();
        r.dt_omega = -e.d_xi0 * moc.params().rho * eval_m(moc.params().profile, 1.0 / x0) * x0;
    }
    const double rhs = r.Omega_bound * r.d_omega + r.D_bound + 2.0 * epsilon * r.d2_omega;
    r.margin = r.substitution_ok ? r.dt_omega - rhs : -kInf;
    return r;
}

void write_margin_csv(const std::vector<MarginRow>& rows, bool with_xi0, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ArgumentError("cannot open " + path);
    os << (with_xi0 ? "xi,xi0,D_bound,Omega_bound,margin\n" : "xi,D_bound,Omega_bound,margin\n");
    char buf[160];
    for (const auto& row : rows) {
        if (with_xi0)
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", row.xi, row.xi0, row.r.D_bound,
                          row.r.Omega_bound, row.r.margin);
        else
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", row.xi, row.r.D_bound, row.r.Omega_bound,
                          row.r.margin);
        os << buf;
    }
}

namespace {

// f(x + s) on the grid by a spectral phase shift.
std::vector<double> shifted(const PeriodicGrid& g, const std::vector<cplx>& spec, double s1, double s2) {
    std::vector<cplx> out(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        int k1, k2;
        g.wavevector(i, k1, k2);
        out[i] = spec[i] * std::polar(1.0, -(k1 * s1 + k2 * s2));
    }
    return inverse_transform(g, out);
}

}  // namespace

AuditReport scenario_audit(const Field& theta, const Moc& moc, const VelocityModel& model, const LevyOperator& op,
                           const CriterionConstants& c, const AuditOptions& opt) {
    const PeriodicGrid& g = theta.grid();
    if (!(op.grid == g)) throw ArgumentError("operator grid does not match the field");
    if (model.dim() != g.d()) throw ArgumentError("velocity model dimension does not match the field");
    if (opt.stride < 1 || opt.angles < 1) throw ArgumentError("stride and angle count must be positive");
    const int N = g.N();
    const int max_off = opt.max_offset > 0 ? opt.max_offset : N / 4;
    if (max_off < opt.stride) throw InsufficientDataError("no separations to audit");
    const double h = g.h();
    const std::size_t n = g.size();

    const auto& th = theta.spectral();
    std::vector<cplx> lth(th.size());
    for (std::size_t i = 0; i < th.size(); ++i) lth[i] = op.symbol[i] * th[i];
    const std::vector<double> L = inverse_transform(g, lth);
    const std::vector<Field> u = apply_velocity(model, theta);
    std::vector<std::vector<cplx>> us;
    for (const auto& f : u) us.push_back(f.spectral());

    std::vector<double> angles;
    if (g.d() == 1)
        angles = {0.0, kPi};
    else
        for (int j = 0; j < opt.angles; ++j) angles.push_back(2.0 * kPi * j / opt.angles);

    struct Shift {
        std::vector<double> th, L;
        std::vector<std::vector<double>> u;
    };
    auto make_shift = [&](double ang, int off, bool full) {
        Shift s;
        if (g.d() == 1) {
            const int sgn = ang == 0.0 ? 1 : -1;
            auto roll = [&](const std::vector<double>& v) {
                std::vector<double> r(n);
                for (int i = 0; i < N; ++i) r[i] = v[((i + sgn * off) % N + N) % N];
                return r;
            };
            s.th = roll(theta.values());
            if (full) {
                s.L = roll(L);
                for (const auto& f : u) s.u.push_back(roll(f.values()));
            }
        } else {
            const double s1 = off * h * std::cos(ang), s2 = off * h * std::sin(ang);
            s.th = shifted(g, th, s1, s2);
            if (full) {
                s.L = shifted(g, lth, s1, s2);
                for (const auto& v : us) s.u.push_back(shifted(g, v, s1, s2));
            }
        }
        return s;
    };

    std::vector<int> offs;
    for (int o = opt.stride; o <= max_off; o += opt.stride) offs.push_back(o);

    // first pass: r_star and the per-(angle, offset) maxima
    AuditReport rep;
    std::vector<std::vector<double>> best(angles.size(), std::vector<double>(offs.size(), -kInf));
    for (std::size_t a = 0; a < angles.size(); ++a) {
        for (std::size_t k = 0; k < offs.size(); ++k) {
            const Shift s = make_shift(angles[a], offs[k], false);
            const double w = moc.omega(offs[k] * h);
            double b = -kInf;
            for (std::size_t i = 0; i < n; ++i) b = std::max(b, (theta[i] - s.th[i]) / w);
            best[a][k] = b;
            rep.r_star = std::max(rep.r_star, b);
        }
    }
    if (!(rep.r_star > 0.0)) throw InsufficientDataError("field is constant on the sampled pairs");

    std::vector<double> Db(offs.size(), std::nan("")), rest(offs.size()), mv(offs.size());
    const double thr = opt.near * rep.r_star;
    for (std::size_t a = 0; a < angles.size(); ++a) {
        const double ea = std::cos(angles[a]), eb = std::sin(angles[a]);
        for (std::size_t k = 0; k < offs.size(); ++k) {
            if (best[a][k] < thr) continue;
            const double xi = offs[k] * h;
            if (std::isnan(Db[k])) {
                Db[k] = dissipation_bound(moc, xi, c);
                rest[k] = (c.C2 + c.C2p) * moc.omega(xi) + c.C2 * drift_tail_integral(moc, xi);
                mv[k] = eval_m(moc.params().profile, 1.0 / xi);
            }
            const Shift s = make_shift(angles[a], offs[k], true);
            const double w = moc.omega(xi);
            for (std::size_t i = 0; i < n; ++i) {
                const double ratio = (theta[i] - s.th[i]) / w / rep.r_star;
                if (ratio < opt.near) continue;
                Scenario sc;
                sc.x = i;
                sc.angle = angles[a];
                sc.xi = xi;
                sc.ratio = ratio;
                sc.D_exact = s.L[i] - L[i];
                double du = (u[0][i] - s.u[0][i]) * ea;
                if (g.d() == 2) du += (u[1][i] - s.u[1][i]) * eb;
                sc.Omega_exact = std::abs(du);
                sc.D_bound = rep.r_star * Db[k];
                sc.Omega_bound = -c.C2 * sc.D_exact / mv[k] + rep.r_star * rest[k];
                sc.D_ok = sc.D_exact <= sc.D_bound + opt.slack * std::abs(sc.D_bound);
                sc.Omega_ok = sc.Omega_exact <= sc.Omega_bound + opt.slack * std::abs(sc.Omega_bound);
                rep.scenarios.push_back(sc);
            }
        }
    }

    std::sort(rep.scenarios.begin(), rep.scenarios.end(),
              [](const Scenario& x, const Scenario& y) { return x.ratio > y.ratio; });
    if (rep.scenarios.size() > opt.max_scenarios) rep.scenarios.resize(opt.max_scenarios);
    rep.worst_D_excess = -kInf;
    rep.worst_Omega_excess = -kInf;
    for (const auto& sc : rep.scenarios) {
        rep.pass = rep.pass && sc.D_ok && sc.Omega_ok;
        rep.worst_D_excess = std::max(rep.worst_D_excess, (sc.D_exact - sc.D_bound) / std::abs(sc.D_bound));
        rep.worst_Omega_excess =
            std::max(rep.worst_Omega_excess, (sc.Omega_exact - sc.Omega_bound) / std::abs(sc.Omega_bound));
    }
    return rep;
}

void write_audit_json(const AuditReport& r, const std::string& path) {
    nlohmann::json j;
    j["r_star"] = r.r_star;
    j["pass"] = r.pass;
    j["worst_D_excess"] = r.worst_D_excess;
    j["worst_Omega_excess"] = r.worst_Omega_excess;
    j["scenarios"] = nlohmann::json::array();
    for (const auto& s : r.scenarios) {
        j["scenarios"].push_back({{"x", s.x},
                                  {"angle", s.angle},
                                  {"xi", s.xi},
                                  {"ratio", s.ratio},
                                  {"D_exact", s.D_exact},
                                  {"D_bound", s.D_bound},
                                  {"Omega_exact", s.Omega_exact},
                                  {"Omega_bound", s.Omega_bound},
                                  {"D_ok", s.D_ok},
                                  {"Omega_ok", s.Omega_ok}});
    }
    std::ofstream os(path);
    if (!os) throw ArgumentError("cannot open " + path);
    os << j.dump(2) << "\n";
}

}  // namespace ddl
