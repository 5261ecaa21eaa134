#include "ddl/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddl/errors.hpp"

namespace ddl {
namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

VelocityModel VelocityModel::burgers() { return {VelocityKind::burgers, {1.0}, {}}; }
VelocityModel VelocityModel::ccf() { return {VelocityKind::ccf, {0.0}, {}}; }
VelocityModel VelocityModel::sqg() { return {VelocityKind::sqg, {0.0, 0.0}, {}}; }
VelocityModel VelocityModel::ipm2d() { return {VelocityKind::ipm2d, {0.0, 0.5}, {}}; }
VelocityModel VelocityModel::ipm3d_slice() { return {VelocityKind::ipm3d_slice, {0.0, 0.5}, {}}; }

VelocityModel VelocityModel::custom(std::vector<double> a, std::vector<std::vector<double>> psi) {
    VelocityModel m{VelocityKind::custom, std::move(a), std::move(psi)};
    m.validate();
    return m;
}

int VelocityModel::dim() const {
    switch (kind) {
        case VelocityKind::burgers:
        case VelocityKind::ccf: return 1;
        case VelocityKind::custom: return static_cast<int>(a.size());
        default: return 2;
    }
}

void VelocityModel::validate() const {
    if (kind != VelocityKind::custom) return;
    const std::size_t d = a.size();
    if (d != 1 && d != 2) throw ArgumentError("custom velocity needs a of dimension 1 or 2");
    if (psi.empty()) throw ArgumentError("custom velocity needs Psi samples");
    if (d == 1 && psi.size() != 2) throw ArgumentError("in d = 1 Psi is sampled at +1 and -1");
    if (d == 2 && psi.size() < 8) throw ArgumentError("in d = 2 Psi needs at least 8 angular samples");
    std::vector<double> mean(d, 0.0);
    double scale = 0.0;
    for (const auto& s : psi) {
        if (s.size() != d) throw ArgumentError("Psi samples must have d components");
        for (std::size_t c = 0; c < d; ++c) {
            mean[c] += s[c];
            scale = std::max(scale, std::abs(s[c]));
        }
    }
    for (double v : mean) {
        if (std::abs(v) / psi.size() > 1e-12 * std::max(scale, 1.0)) {
            throw ArgumentError("Psi must have zero average over the sphere");
        }
    }
}

VelocityKind parse_velocity_kind(const std::string& s) {
    if (s == "burgers") return VelocityKind::burgers;
    if (s == "ccf") return VelocityKind::ccf;
    if (s == "sqg") return VelocityKind::sqg;
    if (s == "ipm2d") return VelocityKind::ipm2d;
    if (s == "ipm3d_slice") return VelocityKind::ipm3d_slice;
    if (s == "custom") return VelocityKind::custom;
    throw ArgumentError("unknown velocity model '" + s + "'");
}

std::string velocity_kind_name(VelocityKind k) {
    switch (k) {
        case VelocityKind::burgers: return "burgers";
        case VelocityKind::ccf: return "ccf";
        case VelocityKind::sqg: return "sqg";
        case VelocityKind::ipm2d: return "ipm2d";
        case VelocityKind::ipm3d_slice: return "ipm3d_slice";
        case VelocityKind::custom: return "custom";
    }
    return "?";
}

double psi_max(const VelocityModel& m) {
    switch (m.kind) {
        case VelocityKind::burgers: return 0.0;
        case VelocityKind::ccf: return 1.0 / kPi;
        case VelocityKind::sqg:
        case VelocityKind::ipm2d:
        case VelocityKind::ipm3d_slice: return 1.0 / (2.0 * kPi);
        case VelocityKind::custom: {
            double s = 0.0;
            for (const auto& v : m.psi) {
                double n = 0.0;
                for (double c : v) n += c * c;
                s = std::max(s, std::sqrt(n));
            }
            return s;
        }
    }
    return 0.0;
}

double a_norm(const VelocityModel& m) {
    double s = 0.0;
    for (double c : m.a) s += c * c;
    return std::sqrt(s);
}

std::vector<cplx> velocity_symbol(const VelocityModel& m, int k1, int k2) {
    const double kk = std::sqrt(double(k1) * k1 + double(k2) * k2);
    switch (m.kind) {
        case VelocityKind::burgers:
            return {1.0};
        case VelocityKind::ccf:
            return {-kI * sgn(k1)};
        case VelocityKind::sqg:
            if (kk == 0.0) return {0.0, 0.0};
            return {kI * (k2 / kk), -kI * (k1 / kk)};
        case VelocityKind::ipm2d:
        case VelocityKind::ipm3d_slice: {
            if (kk == 0.0) return {0.0, 0.0};
            const double q = kk * kk;
            return {-double(k1) * k2 / q, double(k1) * k1 / q};
        }
        case VelocityKind::custom: {
            const int d = m.dim();
            std::vector<cplx> out(d);
            for (int c = 0; c < d; ++c) out[c] = m.a[c];
            if (kk == 0.0) return out;
            // Fourier transform of p.v. Psi(w)/|y|^d on the sphere:
            //   sum_w Psi(w) (-log|w.k^| - i pi/2 sgn(w.k^)) dw
            const std::size_t M = m.psi.size();
            for (std::size_t j = 0; j < M; ++j) {
                double wk, weight;
                if (d == 1) {
                    wk = (j == 0 ? 1.0 : -1.0) * sgn(k1);
                    weight = 1.0;
                } else {
                    const double phi = 2.0 * kPi * (j + 0.5) / M;
                    wk = (std::cos(phi) * k1 + std::sin(phi) * k2) / kk;
                    weight = 2.0 * kPi / M;
                }
                const cplx f = -std::log(std::abs(wk)) - kI * (0.5 * kPi * sgn(wk));
                for (int c = 0; c < d; ++c) out[c] += weight * m.psi[j][c] * f;
            }
            return out;
        }
    }
    return {};
}

namespace {

std::size_t neg_index(const PeriodicGrid& g, std::size_t idx) {
    const int N = g.N();
    if (g.d() == 1) return (N - idx) % N;
    const int i1 = static_cast<int>(idx / N), i2 = static_cast<int>(idx % N);
    return static_cast<std::size_t>(((N - i1) % N) * N + (N - i2) % N);
}

// Enforce u^(-k) = conj(u^(k)); only self-paired Nyquist modes change.
void symmetrize(const PeriodicGrid& g, std::vector<cplx>& s) {
    std::vector<cplx> t(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) t[i] = 0.5 * (s[i] + std::conj(s[neg_index(g, i)]));
    s.swap(t);
}

std::vector<std::vector<cplx>> velocity_spectra(const VelocityModel& m, const Field& theta) {
    const PeriodicGrid& g = theta.grid();
    if (g.d() != m.dim()) throw ArgumentError("velocity model dimension does not match the grid");
    const auto& th = theta.spectral();
    const int d = m.dim();
    std::vector<std::vector<cplx>> u(d, std::vector<cplx>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        int k1, k2;
        g.wavevector(i, k1, k2);
        const auto P = velocity_symbol(m, k1, k2);
        for (int c = 0; c < d; ++c) u[c][i] = P[c] * th[i];
    }
    for (auto& s : u) symmetrize(g, s);
    return u;
}

}  // namespace

std::vector<Field> apply_velocity(const VelocityModel& m, const Field& theta) {
    auto spec = velocity_spectra(m, theta);
    std::vector<Field> out;
    out.reserve(spec.size());
    for (auto& s : spec) out.push_back(Field::from_spectral(theta.grid(), std::move(s)));
    return out;
}

double divergence_residual(const VelocityModel& m, const Field& theta) {
    if (theta.grid().d() != 2 || m.dim() != 2) throw NotApplicableError("divergence is only checked in d = 2");
    const PeriodicGrid& g = theta.grid();
    auto u = velocity_spectra(m, theta);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        int k1, k2;
        g.wavevector(i, k1, k2);
        worst = std::max(worst, std::abs(double(k1) * u[0][i] + double(k2) * u[1][i]));
    }
    return worst;
}

double velocity_l2_bound(const VelocityModel& m, const PeriodicGrid& g) {
    double best = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        int k1, k2;
        g.wavevector(i, k1, k2);
        double s = 0.0;
        for (const cplx& c : velocity_symbol(m, k1, k2)) s += std::norm(c);
        best = std::max(best, std::sqrt(s));
    }
    return a_norm(m) + best;
}

namespace {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) {
                w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
                break;
            }
        }
        x[i] = z;
    }
}

// 1 on [0, a], raised cosine down to 0 at b.
double ramp(double r, double a, double b) {
    if (r <= a) return 1.0;
    if (r >= b) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * (r - a) / (b - a)));
}

}  // namespace

CrosscheckReport ipm_kernel_crosscheck(const Field& theta) {
    const PeriodicGrid& g = theta.grid();
    if (g.d() != 2) throw ArgumentError("the IPM cross-check runs in d = 2");
    if (g.N() > 64) throw ArgumentError("the IPM cross-check is limited to N <= 64");
    const int N = g.N();
    const double h = g.h();
    const double r_in = 4.0 * h, r_out = 12.0 * h;
    const double R = 16.0 * kPi;
    const VelocityModel model = VelocityModel::ipm2d();
    const auto& th = theta.spectral();
    CrosscheckReport rep;

    auto Omega = [](double c, double s) {
        // S(y) |y|^2 at direction (c, s)
        return std::pair<double, double>(2.0 * c * s / (2.0 * kPi), (s * s - c * c) / (2.0 * kPi));
    };

    // Near field: polar quadrature of chi(r) S(y) over r < 12h.
    const int nr = 32, nphi = 128;
    std::vector<double> gx, gw;
    gauss_legendre(nr, gx, gw);
    std::vector<cplx> near1(g.size(), 0.0), near2(g.size(), 0.0);
    for (int a = 0; a < nr; ++a) {
        const double r = 0.5 * r_out * (gx[a] + 1.0);
        const double wr = 0.5 * r_out * gw[a] * ramp(r, r_in, r_out) / r;
        for (int b = 0; b < nphi; ++b) {
            const double phi = 2.0 * kPi * b / nphi;
            const double c = std::cos(phi), s = std::sin(phi);
            const auto [o1, o2] = Omega(c, s);
            const double w = wr * 2.0 * kPi / nphi;
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (th[i] == 0.0) continue;
                int k1, k2;
                g.wavevector(i, k1, k2);
                const cplx e = std::polar(1.0, -r * (k1 * c + k2 * s));
                near1[i] += w * o1 * e;
                near2[i] += w * o2 * e;
            }
        }
    }
    rep.near_nodes = nr * nphi;

    // Far field: lattice sum of (1 - chi) S with a smooth cutoff at R, folded onto the torus.
    const int J = static_cast<int>(std::ceil(R / h));
    std::vector<double> W1(g.size(), 0.0), W2(g.size(), 0.0);
    for (int j1 = -J; j1 <= J; ++j1) {
        for (int j2 = -J; j2 <= J; ++j2) {
            const double y1 = h * j1, y2 = h * j2;
            const double r = std::hypot(y1, y2);
            if (r <= r_in || r >= R) continue;
            const double w = (1.0 - ramp(r, r_in, r_out)) * ramp(r, R / 8.0, R) * h * h / (r * r);
            const auto [o1, o2] = Omega(y1 / r, y2 / r);
            const std::size_t idx = static_cast<std::size_t>(((j1 % N + N) % N) * N + (j2 % N + N) % N);
            W1[idx] += w * o1;
            W2[idx] += w * o2;
            ++rep.far_points;
        }
    }
    // sum_j W_j e^{-ik.y_j} = N^2 conj(transform(W))
    const auto F1 = transform(g, W1);
    const auto F2 = transform(g, W2);
    const double n2 = double(N) * N;

    std::vector<cplx> q1(g.size()), q2(g.size()), m1(g.size()), m2(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        int k1, k2;
        g.wavevector(i, k1, k2);
        const cplx f1 = n2 * std::conj(F1[i]), f2 = n2 * std::conj(F2[i]);
        q1[i] = (model.a[0] + near1[i] + f1) * th[i];
        q2[i] = (model.a[1] + near2[i] + f2) * th[i];
        auto P = velocity_symbol(model, k1, k2);
        if (k1 == 0 && k2 == 0) P = {model.a[0], model.a[1]};
        m1[i] = P[0] * th[i];
        m2[i] = P[1] * th[i];
    }
    for (auto* s : {&q1, &q2, &m1, &m2}) symmetrize(g, *s);
    const auto uq1 = inverse_transform(g, q1), uq2 = inverse_transform(g, q2);
    const auto um1 = inverse_transform(g, m1), um2 = inverse_transform(g, m2);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(uq1[i]) || !std::isfinite(uq2[i])) {
            throw ConvergenceError("kernel quadrature produced a non-finite value", rep.max_abs);
        }
        rep.max_abs = std::max({rep.max_abs, std::abs(uq1[i] - um1[i]), std::abs(uq2[i] - um2[i])});
        rep.u_max = std::max({rep.u_max, std::abs(um1[i]), std::abs(um2[i])});
    }
    rep.max_rel = rep.u_max > 0.0 ? rep.max_abs / rep.u_max : rep.max_abs;
    return rep;
}

}  // namespace ddl
