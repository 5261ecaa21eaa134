#include "ddl/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ddl/errors.hpp"
#include "json.hpp"

namespace ddl {
namespace {

const cplx kI(0.0, 1.0);

bool all_finite(const std::vector<cplx>& v) {
    for (const cplx& c : v) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

int retained_cut(const PeriodicGrid& g, bool dealiased) { return dealiased ? g.N() / 3 : g.N() / 2; }

// Largest |k_i| of a mode, the natural shell index for the square retained set.
int kinf(const PeriodicGrid& g, std::size_t idx) {
    int k1, k2;
    g.wavevector(idx, k1, k2);
    return std::max(std::abs(k1), std::abs(k2));
}

double top_octave_fraction(const PeriodicGrid& g, const std::vector<cplx>& s, int cut) {
    double top = 0.0, all = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double e = std::norm(s[i]);
        const int k = kinf(g, i);
        if (k > cut) continue;
        all += e;
        if (2 * k > cut) top += e;
    }
    return all > 0.0 ? top / all : 0.0;
}

double dissipation_rate(const std::vector<double>& sym, const std::vector<cplx>& s) {
    double r = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) r += sym[i] * std::norm(s[i]);
    return r;
}

double gradient_energy(const PeriodicGrid& g, const std::vector<cplx>& s) {
    double r = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double k = g.kmag(i);
        r += k * k * std::norm(s[i]);
    }
    return r;
}

// max |grad theta| and min d theta/dx1 on the grid.
void gradient_stats(const PeriodicGrid& g, const std::vector<cplx>& s, double& gmax, double& dx_min) {
    std::vector<cplx> d1(s.size()), d2;
    if (g.d() == 2) d2.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        int k1, k2;
        g.wavevector(i, k1, k2);
        d1[i] = -kI * double(k1) * s[i];
        if (g.d() == 2) d2[i] = -kI * double(k2) * s[i];
    }
    const auto g1 = inverse_transform(g, d1);
    std::vector<double> g2;
    if (g.d() == 2) g2 = inverse_transform(g, d2);
    gmax = 0.0;
    dx_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g1.size(); ++i) {
        const double a = g1[i];
        const double b = g.d() == 2 ? g2[i] : 0.0;
        gmax = std::max(gmax, std::sqrt(a * a + b * b));
        dx_min = std::min(dx_min, a);
    }
}

int auto_stride(const PeriodicGrid& g) {
    const double pts = static_cast<double>(g.size());
    if (pts <= 4096.0) return 1;
    return static_cast<int>(std::ceil(std::pow(pts / 4096.0, 1.0 / g.d())));
}

}  // namespace

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw ArgumentError("dt must be positive");
    if (!(t_end >= 0.0)) throw ArgumentError("t_end must be nonnegative");
    if (!(epsilon >= 0.0)) throw ArgumentError("epsilon must be nonnegative");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ArgumentError("cfl_safety must lie in (0, 1]");
    if (record_every < 1) throw ArgumentError("record_every must be at least 1");
    if (holder_beta >= 1.0) throw ArgumentError("holder_beta must be below 1");
    if (holder_stride < 0) throw ArgumentError("holder_stride must be nonnegative");
}

Stepper::Stepper(const VelocityModel& model, const LevyOperator& op, const SolverConfig& cfg)
    : model_(model), grid_(op.grid), cfg_(cfg) {
    if (model.dim() != grid_.d()) throw ArgumentError("velocity model dimension does not match the grid");
    const std::size_t n = grid_.size();
    lin_.resize(n);
    keep_.resize(n);
    vel_.assign(model.dim(), std::vector<cplx>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double k = grid_.kmag(i);
        lin_[i] = op.symbol[i] + cfg.epsilon * k * k;
        keep_[i] = !cfg.dealias || dealias_keeps(grid_, i);
        int k1, k2;
        grid_.wavevector(i, k1, k2);
        const auto P = velocity_symbol(model, k1, k2);
        for (int c = 0; c < model.dim(); ++c) vel_[c][i] = P[c];
    }
}

std::vector<cplx> Stepper::nonlinear(const std::vector<cplx>& th, double* umax) const {
    const std::size_t n = grid_.size();
    const int d = grid_.d();
    std::vector<double> prod(n, 0.0);
    std::vector<cplx> w(n);
    double um = 0.0;
    std::vector<double> speed2(n, 0.0);
    for (int c = 0; c < d; ++c) {
        for (std::size_t i = 0; i < n; ++i) w[i] = vel_[c][i] * th[i];
        const auto u = inverse_transform(grid_, w);
        for (std::size_t i = 0; i < n; ++i) {
            int k1, k2;
            grid_.wavevector(i, k1, k2);
            w[i] = -kI * double(c == 0 ? k1 : k2) * th[i];
        }
        const auto gr = inverse_transform(grid_, w);
        for (std::size_t i = 0; i < n; ++i) {
            prod[i] += u[i] * gr[i];
            speed2[i] += u[i] * u[i];
        }
    }
    for (double s : speed2) um = std::max(um, s);
    if (umax) *umax = std::sqrt(um);
    auto out = transform(grid_, prod);
    for (std::size_t i = 0; i < n; ++i) out[i] = keep_[i] ? -out[i] : cplx(0.0);
    return out;
}

double Stepper::cfl_dt(double umax) const {
    if (!cfg_.adaptive_dt || !cfg_.nonlinear || umax <= 0.0) return cfg_.dt;
    return std::min(cfg_.dt, cfg_.cfl_safety * grid_.h() / umax);
}

double Stepper::step(std::vector<cplx>& th, double dt) const {
    const std::size_t n = grid_.size();
    std::vector<double> E(n), E2(n);
    for (std::size_t i = 0; i < n; ++i) {
        E[i] = std::exp(-lin_[i] * dt);
        E2[i] = std::exp(-lin_[i] * 0.5 * dt);
    }
    if (!cfg_.nonlinear) {
        for (std::size_t i = 0; i < n; ++i) th[i] *= E[i];
        return 0.0;
    }
    double umax = 0.0;
    const auto k1 = nonlinear(th, &umax);
    std::vector<cplx> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = E2[i] * (th[i] + 0.5 * dt * k1[i]);
    const auto k2 = nonlinear(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = E2[i] * th[i] + 0.5 * dt * k2[i];
    const auto k3 = nonlinear(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = E[i] * th[i] + dt * E2[i] * k3[i];
    const auto k4 = nonlinear(tmp);
    for (std::size_t i = 0; i < n; ++i) {
        th[i] = E[i] * th[i] + dt / 6.0 * (E[i] * k1[i] + 2.0 * E2[i] * (k2[i] + k3[i]) + k4[i]);
    }
    return umax;
}

double spectral_sup_norm(const Field& theta) {
    const PeriodicGrid& g = theta.grid();
    const auto& v = theta.values();
    double best = norm_linf(theta);
    if (g.d() != 1 || g.size() < 4) return best;
    const int N = g.N();
    // candidate local maxima of |theta|, largest first
    std::vector<std::pair<double, int>> cand;
    for (int i = 0; i < N; ++i) {
        const double a = std::abs(v[(i + N - 1) % N]), b = std::abs(v[i]), c = std::abs(v[(i + 1) % N]);
        if (b >= a && b >= c) cand.emplace_back(b, i);
    }
    std::sort(cand.begin(), cand.end(), std::greater<>());
    if (cand.size() > 4) cand.resize(4);
    const auto& s = theta.spectral();
    auto eval = [&](double x, double& f, double& f1, double& f2) {
        f = f1 = f2 = 0.0;
        for (int j = 0; j < N; ++j) {
            const int k = g.freq(j);
            const cplx e = s[j] * std::polar(1.0, -k * x);
            f += e.real();
            f1 += (-kI * double(k) * e).real();
            f2 += (-double(k) * k * e).real();
        }
    };
    const double h = g.h();
    for (const auto& [val, i] : cand) {
        const double x0 = g.coord(i);
        double x = x0;
        double f = 0.0, f1 = 0.0, f2 = 0.0;
        for (int it = 0; it < 8; ++it) {
            eval(x, f, f1, f2);
            if (f2 == 0.0) break;
            const double nx = x - f1 / f2;
            if (std::abs(nx - x0) > h) break;
            x = nx;
        }
        eval(x, f, f1, f2);
        best = std::max(best, std::abs(f));
    }
    return best;
}

DiagnosticsRecord diagnose(const Field& theta, double beta, int stride, double s) {
    DiagnosticsRecord r;
    const PeriodicGrid& g = theta.grid();
    r.linf = spectral_sup_norm(theta);
    r.l2 = norm_l2(theta);
    gradient_stats(g, theta.spectral(), r.grad_max, r.min_dx);
    r.holder = holder_seminorm(theta, beta, stride > 0 ? stride : auto_stride(g)).value;
    r.hs = norm_hs(theta, s);
    return r;
}

SimulationResult simulate(const Field& theta0, const VelocityModel& model, const LevyOperator& op,
                          const SolverConfig& cfg, const RadialProfile* profile, const Observer& observer) {
    cfg.validate();
    if (!(theta0.grid() == op.grid)) throw ArgumentError("initial data and operator live on different grids");
    for (double x : theta0.values()) {
        if (!std::isfinite(x)) throw ArgumentError("initial data must be finite");
    }
    const auto t_start = std::chrono::steady_clock::now();
    const PeriodicGrid& g = op.grid;
    Stepper stepper(model, op, cfg);

    SimulationResult res{{}, Field(g)};
    double beta = cfg.holder_beta;
    if (beta < 0.0) {
        beta = profile ? std::min(0.95, 1.0 - profile->alpha + profile->sigma + 0.05) : 0.5;
    }
    res.holder_beta = beta;
    const int cut = retained_cut(g, cfg.dealias);

    std::vector<cplx> th = theta0.spectral();
    if (cfg.dealias) th = dealias(g, th);

    double t = 0.0;
    double ldiss = 0.0, vdiss = 0.0;
    double rate_l = dissipation_rate(op.symbol, th);
    double rate_v = cfg.epsilon * gradient_energy(g, th);
    long records = 0;

    auto record = [&](double dt_used) {
        Field f = Field::from_spectral(g, th);
        DiagnosticsRecord r = diagnose(f, beta, cfg.holder_stride, cfg.hs_s);
        r.t = t;
        r.energy_dissipated = ldiss;
        r.viscous_dissipated = vdiss;
        r.top_fraction = top_octave_fraction(g, th, cut);
        r.dt = dt_used;
        res.series.push_back(r);
        if (observer) observer(t, f);
        if (!cfg.snapshot_dir.empty() && cfg.snapshot_every > 0 && records % cfg.snapshot_every == 0) {
            std::filesystem::create_directories(cfg.snapshot_dir);
            std::ostringstream name;
            name << cfg.snapshot_dir << "/snap_" << std::setw(6) << std::setfill('0') << records << ".bin";
            write_binary(f, name.str());
        }
        ++records;
    };
    record(0.0);

    const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);
    double dt = cfg.dt;
    while (t < cfg.t_end - t_eps) {
        double umax = 0.0;
        if (cfg.nonlinear && cfg.adaptive_dt) stepper.nonlinear(th, &umax);
        dt = std::min(stepper.cfl_dt(umax), cfg.t_end - t);
        const double t_prev = t;
        stepper.step(th, dt);
        t += dt;
        ++res.steps;

        std::string reason;
        if (!all_finite(th)) {
            reason = "non-finite state";
        } else {
            double gmax, dxmin;
            gradient_stats(g, th, gmax, dxmin);
            const double frac = top_octave_fraction(g, th, cut);
            if (gmax > cfg.blowup_grad) reason = "gradient threshold";
            else if (frac > cfg.blowup_top_fraction) reason = "resolution loss";
        }
        if (!reason.empty()) {
            res.blowup = true;
            res.blowup_reason = reason;
            res.blowup_lo = t_prev;
            res.blowup_hi = t;
            if (all_finite(th)) record(dt);
            break;
        }

        const double nl = dissipation_rate(op.symbol, th);
        const double nv = cfg.epsilon * gradient_energy(g, th);
        ldiss += 0.5 * dt * (rate_l + nl);
        vdiss += 0.5 * dt * (rate_v + nv);
        rate_l = nl;
        rate_v = nv;

        if (res.steps % cfg.record_every == 0 || t >= cfg.t_end - t_eps) record(dt);
    }
    res.t_final = t;
    if (all_finite(th)) res.final_state = Field::from_spectral(g, th);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

MonitorNorm monitor_norm_for(const VelocityModel& model) {
    switch (model.kind) {
        case VelocityKind::sqg:
        case VelocityKind::ipm2d:
        case VelocityKind::ipm3d_slice: return MonitorNorm::l2;
        default: return MonitorNorm::linf;
    }
}

MonitorReport max_principle_monitor(const std::vector<DiagnosticsRecord>& series, MonitorNorm norm, double tol) {
    MonitorReport rep;
    rep.norm = norm;
    rep.records = static_cast<int>(series.size());
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double a = norm == MonitorNorm::linf ? series[i - 1].linf : series[i - 1].l2;
        const double b = norm == MonitorNorm::linf ? series[i].linf : series[i].l2;
        const double inc = b - a;
        if (inc > rep.worst_increase) {
            rep.worst_increase = inc;
            rep.at_t = series[i].t;
        }
    }
    rep.pass = rep.worst_increase <= tol;
    return rep;
}

double linf_level_estimate(double l2_0, double t0, double alpha, double sigma, int d, double T, double C) {
    const double gam = alpha - sigma;
    if (!(t0 > 0.0)) throw ArgumentError("t0 must be positive");
    if (!(gam > 0.0)) throw ArgumentError("alpha - sigma must be positive");
    if (C < 0.0) throw ArgumentError("C must be nonnegative");
    if (l2_0 < 0.0) throw ArgumentError("L2 norm must be nonnegative");
    const double base = std::pow(2.0, 2.0 + d / gam) * (2.0 / t0 + 4.0 * C);
    return std::sqrt(1.0 + 2.0 * C * T) * l2_0 * std::pow(base, d / (2.0 * gam));
}

double local_time_estimate(double hs_norm_0, double C_tilde) {
    if (!(hs_norm_0 > 0.0) || !(C_tilde > 0.0)) throw ArgumentError("both arguments must be positive");
    return 1.0 / (C_tilde * hs_norm_0);
}

void write_diagnostics_csv(const std::vector<DiagnosticsRecord>& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot open " + path);
    out << std::setprecision(12);
    out << "t,linf,l2,grad_max,holder_beta,hs,energy_dissipated\n";
    for (const auto& r : series) {
        out << r.t << ',' << r.linf << ',' << r.l2 << ',' << r.grad_max << ',' << r.holder << ',' << r.hs << ','
            << r.energy_dissipated << '\n';
    }
}

void write_summary_json(const SimulationResult& res, const SolverConfig& cfg, const std::string& model_name,
                        const std::string& profile_desc, const std::string& path) {
    nlohmann::json j;
    j["config"] = {{"dt", cfg.dt},
                   {"t_end", cfg.t_end},
                   {"epsilon", cfg.epsilon},
                   {"cfl_safety", cfg.cfl_safety},
                   {"record_every", cfg.record_every},
                   {"scheme", "if_rk4"},
                   {"dealias", cfg.dealias},
                   {"nonlinear", cfg.nonlinear},
                   {"holder_beta", res.holder_beta},
                   {"hs_s", cfg.hs_s}};
    j["model"] = model_name;
    j["profile"] = profile_desc;
    j["blowup"] = res.blowup;
    if (res.blowup) {
        j["blowup_reason"] = res.blowup_reason;
        j["blowup_bracket"] = {res.blowup_lo, res.blowup_hi};
    }
    j["t_final"] = res.t_final;
    j["steps"] = res.steps;
    j["wall_seconds"] = res.wall_seconds;
    if (!res.series.empty()) {
        const auto& r = res.series.back();
        j["final"] = {{"linf", r.linf}, {"l2", r.l2}, {"grad_max", r.grad_max}, {"holder", r.holder}, {"hs", r.hs}};
    }
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot open " + path);
    out << j.dump(2) << '\n';
}

}  // namespace ddl
