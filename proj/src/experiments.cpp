#include "ddl/experiments.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "ddl/criterion.hpp"
#include "ddl/errors.hpp"
#include "json.hpp"

namespace ddl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr const char* kVersion = "1.0.0";

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw ArgumentError("log grid needs 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return g;
}

KernelCase parse_case(const std::string& s) {
    if (s == "I") return KernelCase::I;
    if (s == "II") return KernelCase::II;
    if (s == "III") return KernelCase::III;
    throw ArgumentError("kernel case must be I, II or III, got " + s);
}

std::string case_name(KernelCase k) { return k == KernelCase::I ? "I" : k == KernelCase::II ? "II" : "III"; }

MocFamily parse_moc_family(const std::string& s) {
    if (s == "stationary") return MocFamily::stationary;
    if (s == "eventual") return MocFamily::eventual;
    throw ArgumentError("moc.family must be stationary or eventual, got " + s);
}

std::string moc_family_name(MocFamily f) { return f == MocFamily::stationary ? "stationary" : "eventual"; }

double default_beta(const RadialProfile& p) { return 1.0 - 0.5 * (p.alpha - p.sigma); }

json coefficients_json(const Coefficients& c) {
    json j{{"kappa", c.kappa}, {"gamma", c.gamma}, {"rho", c.rho}, {"kappa_max", c.kappa_max},
           {"gamma_max", c.gamma_max}, {"rho_max", c.rho_max}, {"all_hold", c.all_hold()}};
    j["checks"] = json::array();
    for (const auto& q : c.checks)
        j["checks"].push_back({{"label", q.label}, {"value", q.value}, {"bound", q.bound}, {"holds", q.holds()}});
    return j;
}

json constants_json(const CriterionConstants& c) {
    return {{"C1", c.C1}, {"C2", c.C2}, {"C1p", c.C1p}, {"C2p", c.C2p}, {"C0", c.C0},
            {"c_tilde", c.c_tilde}, {"case", case_name(c.kcase)}};
}

json params_json(const MocParams& p) {
    return {{"kappa", p.kappa}, {"gamma", p.gamma}, {"delta", p.delta}, {"beta", p.beta}, {"rho", p.rho},
            {"A0", p.A0}, {"c_cut", std::isfinite(p.c_cut) ? json(p.c_cut) : json("inf")}};
}

struct Outcome {
    bool pass = true;
    std::string recipe;
    json summary = json::object();
};

struct Setup {
    PeriodicGrid grid{1, 8};
    RadialProfile profile;
    VelocityModel model;
    KernelSpec spec;
};

Setup common_setup(const Config& c) {
    Setup s;
    s.grid = grid_from_config(c);
    s.profile = profile_from_config(c);
    s.model = model_from_config(c, s.grid.d());
    s.spec = kernel_spec_from_config(c, s.profile, s.grid.d());
    return s;
}

int auto_stride(const PeriodicGrid& g, long long requested) {
    if (requested > 0) return int(requested);
    const int target = g.d() == 1 ? 4096 : 64;
    int s = 1;
    while (g.N() / s > target) s *= 2;
    return s;
}

// ---- simulate ----------------------------------------------------------------

Outcome run_simulate(const Config& c, const RunOptions& opt) {
    Setup s = common_setup(c);
    SolverConfig sc = solver_from_config(c);
    const LevyOperator op = operator_from_config(c, s.spec, s.grid);
    const Field theta0 = initial_from_config(c, s.grid, opt.seed);
    const bool check_mp = c.get_bool("checks", "max_principle", true);
    const std::optional<bool> expect_blowup =
        c.has("checks", "expect_blowup") ? std::optional<bool>(c.get_bool("checks", "expect_blowup", false))
                                         : std::nullopt;

    const SimulationResult r = simulate(theta0, s.model, op, sc, &s.profile);
    write_diagnostics_csv(r.series, (fs::path(opt.output_dir) / "diagnostics.csv").string());
    write_summary_json(r, sc, velocity_kind_name(s.model.kind), s.profile.describe(),
                       (fs::path(opt.output_dir) / "summary.json").string());

    Outcome o;
    o.recipe = "drift-diffusion-" + velocity_kind_name(s.model.kind);
    o.summary["blowup"] = r.blowup;
    o.summary["blowup_reason"] = r.blowup_reason;
    o.summary["blowup_bracket"] = r.blowup ? json::array({r.blowup_lo, r.blowup_hi}) : json(nullptr);
    o.summary["t_final"] = r.t_final;
    o.summary["steps"] = r.steps;
    o.summary["final_grad_max"] = r.series.empty() ? 0.0 : r.series.back().grad_max;
    if (check_mp) {
        const MonitorReport m = max_principle_monitor(r.series, monitor_norm_for(s.model));
        o.summary["max_principle"] = {{"norm", m.norm == MonitorNorm::linf ? "linf" : "l2"},
                                      {"pass", m.pass},
                                      {"worst_increase", m.worst_increase},
                                      {"at_t", m.at_t}};
        o.pass = o.pass && m.pass;
    }
    if (expect_blowup) {
        o.summary["expect_blowup"] = *expect_blowup;
        o.pass = o.pass && (r.blowup == *expect_blowup);
    }
    return o;
}

// ---- moc_check ---------------------------------------------------------------

Outcome run_moc_check(const Config& c, const RunOptions& opt) {
    Setup s = common_setup(c);
    const MocFamily fam = parse_moc_family(c.get_string("moc", "family", "stationary"));
    const double beta = c.get_double("moc", "beta", default_beta(s.profile));
    const double c_cut = c.get_double("moc", "c_cut", std::numeric_limits<double>::infinity());
    const int stride = auto_stride(s.grid, c.get_int("moc", "stride", 0));
    const Field theta0 = initial_from_config(c, s.grid, opt.seed);

    const CriterionConstants K = estimate_constants(s.spec, s.model);
    const Coefficients coef = select_coefficients(s.profile.alpha, s.profile.sigma, beta, K, fam);
    const FitResult fit = initial_fit(theta0, fam, s.profile, beta, coef, c_cut, stride);
    MocParams p{coef.kappa, coef.gamma, fit.delta, beta, coef.rho, fit.A0, c_cut, s.profile};
    const Moc moc(fam, p, fam == MocFamily::eventual ? fit.A0 : 0.0);

    const double top = fam == MocFamily::eventual ? 10.0 * fit.A0 : 100.0 * fit.delta;
    const auto xs = log_grid(1e-3 * fit.delta, top, 200);
    const ShapeReport shape = validate_shape(moc, xs);
    const ObeyReport ob = obeys_moc(theta0, moc, stride);
    write_moc_csv(moc, xs, (fs::path(opt.output_dir) / "moc.csv").string());

    Outcome o;
    o.recipe = moc_family_name(fam) + "-moc-obedience";
    o.summary["constants"] = constants_json(K);
    o.summary["coefficients"] = coefficients_json(coef);
    o.summary["moc"] = params_json(p);
    o.summary["fit"] = {{"delta", fit.delta}, {"A0", fit.A0}, {"linf", fit.linf}, {"holder", fit.holder},
                        {"condition_value", fit.condition_value}, {"condition_bound", fit.condition_bound},
                        {"iterations", fit.iterations}, {"closed_form", fit.closed_form}};
    o.summary["shape"] = {{"pass", shape.pass}, {"monotone", shape.monotone}, {"concave", shape.concave},
                          {"holder_ratio", shape.holder_ratio}, {"jump_sign", shape.jump_sign},
                          {"worst", shape.worst}, {"worst_xi", shape.worst_xi}};
    o.summary["obeys"] = {{"pass", ob.pass}, {"worst_ratio", ob.worst_ratio}, {"worst_dist", ob.worst_dist},
                          {"stride", stride}};
    o.pass = shape.pass && ob.pass && coef.all_hold();
    return o;
}

// ---- kernel_lab --------------------------------------------------------------

Outcome run_kernel_lab(const Config& c, const RunOptions& opt) {
    const RadialProfile p = profile_from_config(c);
    const double zmax = c.get_double("kernel", "zeta_max", 4096.0);
    const double rmin = c.get_double("kernel", "r_min", 0.02);
    const double rmax = c.get_double("kernel", "r_max", 2.0);
    const int nr = int(c.get_int("kernel", "points", 40));
    const int N = int(c.get_int("kernel", "symbol_N", 64));

    const MdecReport md = check_mdec(p, log_grid(1e-3, 1e4, 400));
    const KernelSample ks = kernel_from_multiplier(p, log_grid(rmin, rmax, nr), zmax);
    {
        std::ofstream os(fs::path(opt.output_dir) / "kernel.csv");
        os.precision(12);
        os << "r,K\n";
        for (std::size_t i = 0; i < ks.radii.size(); ++i) os << ks.radii[i] << "," << ks.K[i] << "\n";
    }

    const PeriodicGrid g(1, N);
    const LevyOperator mult = symbol_from_multiplier(p, g);
    const SymbolFit fit = symbol_lower_bound_fit(mult, p.alpha, p.sigma);

    Outcome o;
    o.recipe = "kernel-symbol-lab";
    o.summary["mdec"] = {{"pass", md.pass}, {"worst_margin", md.worst_margin}, {"worst_r", md.worst_r}};
    const double floor = -1e-8 * ks.max_K;
    const bool nonneg = ks.min_K >= floor;
    o.summary["kernel"] = {{"min_K", ks.min_K}, {"max_K", ks.max_K}, {"nonnegative", nonneg}, {"c5", ks.c5}};
    o.summary["symbol_fit"] = {{"C_low", fit.C_low}, {"C_off", fit.C_off}, {"pure_power_form", fit.pure_power_form}};

    if (c.get_bool("kernel", "compare_symbol", true) && p.family == ProfileFamily::power && p.alpha < 2.0) {
        KernelSpec spec{p, 1.0, p.alpha, KernelCase::III, 1, fractional_laplacian_scale(1, p.alpha)};
        const LevyOperator quad = symbol_table_from_kernel(spec, g);
        write_symbol_csv(quad, (fs::path(opt.output_dir) / "symbol.csv").string());
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (mult.symbol[i] > 0.0) worst = std::max(worst, std::abs(quad.symbol[i] / mult.symbol[i] - 1.0));
        o.summary["symbol_quadrature_rel_error"] = worst;
    } else {
        write_symbol_csv(mult, (fs::path(opt.output_dir) / "symbol.csv").string());
    }
    o.pass = md.pass && nonneg;
    return o;
}

// ---- criterion_grid ----------------------------------------------------------

int region_of(double xi, double xi0, double delta) {
    if (xi0 <= delta) return xi <= xi0 ? 0 : xi <= delta ? 1 : 2;
    return xi <= delta ? 3 : xi <= xi0 ? 4 : 5;
}

Outcome run_criterion_grid(const Config& c, const RunOptions& opt) {
    Setup s = common_setup(c);
    const MocFamily fam = parse_moc_family(c.get_string("moc", "family", "stationary"));
    const double beta = c.get_double("moc", "beta", default_beta(s.profile));
    const double delta = c.get_double("moc", "delta", 0.1);
    const double eps = c.get_double("criterion", "epsilon", 0.0);
    const double xlo = c.get_double("criterion", "xi_min", delta / 100.0);
    const double xhi = c.get_double("criterion", "xi_max", delta * 100.0);
    const int nx = int(c.get_int("criterion", "points", fam == MocFamily::stationary ? 64 : 32));

    const CriterionConstants K = estimate_constants(s.spec, s.model);
    const Coefficients coef = select_coefficients(s.profile.alpha, s.profile.sigma, beta, K, fam);
    MocParams p{coef.kappa, coef.gamma, delta, beta, coef.rho, c.get_double("moc", "A0", 10.0 * delta),
                std::numeric_limits<double>::infinity(), s.profile};
    const auto xs = log_grid(xlo, xhi, nx);

    Outcome o;
    o.recipe = moc_family_name(fam) + "-moc-criterion";
    o.summary["constants"] = constants_json(K);
    o.summary["coefficients"] = coefficients_json(coef);
    o.summary["moc"] = params_json(p);

    std::vector<MarginRow> rows;
    double worst = std::numeric_limits<double>::infinity();
    if (fam == MocFamily::stationary) {
        const Moc moc(fam, p);
        const double B0 = c.get_double("criterion", "B0", 0.5 * moc.omega(xhi));
        for (double x : xs) rows.push_back({x, 0.0, criterion_margin(moc, x, 0.0, eps, K, B0)});
    } else {
        const double x0lo = c.get_double("criterion", "xi0_min", delta / 10.0);
        const double x0hi = c.get_double("criterion", "xi0_max", delta * 10.0);
        const auto x0s = log_grid(x0lo, x0hi, int(c.get_int("criterion", "xi0_points", 32)));
        const Moc base(fam, p, x0s.front(), std::max(xhi, x0hi) * 4.0);
        std::vector<int> hits(6, 0);
        for (double x0 : x0s) {
            const Moc moc = base.with_xi0(x0);
            std::optional<double> B0 = c.get_optional("criterion", "B0");
            for (double x : xs) {
                rows.push_back({x, x0, criterion_margin(moc, x, x0, eps, K, B0)});
                ++hits[region_of(x, x0, delta)];
            }
        }
        o.summary["regions_hit"] = hits;
        o.summary["all_regions_covered"] = std::all_of(hits.begin(), hits.end(), [](int h) { return h > 0; });
    }
    int negative = 0;
    bool subst = true;
    for (const auto& r : rows) {
        worst = std::min(worst, r.r.margin);
        negative += r.r.margin > 0.0 ? 0 : 1;
        subst = subst && r.r.substitution_ok;
    }
    write_margin_csv(rows, fam == MocFamily::eventual, (fs::path(opt.output_dir) / "margin.csv").string());
    o.summary["nodes"] = rows.size();
    o.summary["nonpositive_nodes"] = negative;
    o.summary["min_margin"] = worst;
    o.summary["substitution_ok"] = subst;
    o.pass = negative == 0 && coef.all_hold();
    return o;
}

// ---- eventual_regularity -----------------------------------------------------

Outcome run_eventual(const Config& c, const RunOptions& opt) {
    Setup s = common_setup(c);
    SolverConfig sc = solver_from_config(c);
    const double beta = c.get_double("moc", "beta", default_beta(s.profile));
    sc.holder_beta = beta;
    const int stride = auto_stride(s.grid, c.get_int("moc", "stride", 0));
    sc.holder_stride = stride;
    const LevyOperator op = operator_from_config(c, s.spec, s.grid);
    const Field theta0 = initial_from_config(c, s.grid, opt.seed);

    const CriterionConstants K = estimate_constants(s.spec, s.model);
    const Coefficients coef = select_coefficients(s.profile.alpha, s.profile.sigma, beta, K, MocFamily::eventual);
    const FitResult fit = initial_fit(theta0, MocFamily::eventual, s.profile, beta, coef,
                                      std::numeric_limits<double>::infinity(), stride);
    MocParams p{coef.kappa, coef.gamma, fit.delta, beta, coef.rho, fit.A0, std::numeric_limits<double>::infinity(),
                s.profile};
    const Moc base(MocFamily::eventual, p, fit.A0);
    const T1Report t1 = eventual_time_t1(p);
    const double cap = holder_cap(p);

    struct Row {
        double t, xi0, ratio, holder;
        bool obeys;
    };
    std::vector<Row> rows;
    auto observer = [&](double t, const Field& th) {
        const double x0 = xi0_solve(p, t);
        const ObeyReport ob = obeys_moc(th, base.with_xi0(x0), stride);
        const double hol = holder_seminorm(th, beta, stride).value;
        rows.push_back({t, x0, ob.worst_ratio, hol, ob.pass});
    };
    const SimulationResult r = simulate(theta0, s.model, op, sc, &s.profile, observer);
    write_diagnostics_csv(r.series, (fs::path(opt.output_dir) / "diagnostics.csv").string());
    {
        std::ofstream os(fs::path(opt.output_dir) / "eventual.csv");
        os.precision(12);
        os << "t,xi0,obeys,worst_ratio,holder,cap\n";
        for (const auto& w : rows)
            os << w.t << "," << w.xi0 << "," << (w.obeys ? 1 : 0) << "," << w.ratio << "," << w.holder << "," << cap
               << "\n";
    }

    bool all_obey = true, capped = true, reached = false;
    double worst_after = 0.0;
    for (const auto& w : rows) {
        all_obey = all_obey && w.obeys;
        if (w.t >= t1.t1_est) {
            reached = true;
            worst_after = std::max(worst_after, w.holder);
            capped = capped && w.holder <= cap;
        }
    }
    Outcome o;
    o.recipe = "eventual-regularity-holder-track";
    o.summary["constants"] = constants_json(K);
    o.summary["coefficients"] = coefficients_json(coef);
    o.summary["moc"] = params_json(p);
    o.summary["t1"] = t1.t1_est;
    o.summary["t1_reached"] = reached;
    o.summary["holder_cap"] = cap;
    o.summary["max_holder_after_t1"] = worst_after;
    o.summary["all_obey"] = all_obey;
    o.summary["blowup"] = r.blowup;
    o.pass = all_obey && capped && !r.blowup;
    return o;
}

json read_json(const fs::path& p) {
    std::ifstream is(p);
    return json::parse(is);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"simulate",       "moc_check",           "kernel_lab",
                                                "criterion_grid", "eventual_regularity", "report"};
    return names;
}

PeriodicGrid grid_from_config(const Config& c) {
    const long long d = c.get_int("grid", "d", 1);
    const long long N = c.get_int("grid", "N", 256);
    if (d != 1 && d != 2) throw ArgumentError("grid.d must be 1 or 2");
    if (N < 8 || N % 2) throw ArgumentError("grid.N must be even and at least 8");
    return PeriodicGrid(int(d), int(N));
}

RadialProfile profile_from_config(const Config& c) {
    const ProfileFamily f = parse_family(c.get_string("profile", "family", "power"));
    const double alpha = c.get_double("profile", "alpha", 1.0);
    const double sigma = c.get_double("profile", "sigma", 0.0);
    const std::optional<double> c0 = c.get_optional("profile", "c0");
    RadialProfile p;
    switch (f) {
        case ProfileFamily::power:
            p = RadialProfile::power(alpha);
            p.sigma = sigma;
            p.c0 = c0;
            break;
        case ProfileFamily::power_log:
            p = RadialProfile::power_log(alpha, c.get_double("profile", "mu", 1.0),
                                         c.get_double("profile", "lambda", std::exp(1.0)), sigma, c0);
            break;
        case ProfileFamily::power_loglog:
            p = RadialProfile::power_loglog(c.get_double("profile", "mu", 1.0), c.get_double("profile", "lambda", 3.0),
                                            c.get_double("profile", "lambda2", 3.0), sigma, c0);
            break;
        case ProfileFamily::table: {
            const std::string interp = c.get_string("profile", "interp", "loglog");
            p = RadialProfile::table(c.get_array("profile", "table_r"), c.get_array("profile", "table_m"), alpha,
                                     sigma, c0, interp == "linear" ? TableInterp::linear : TableInterp::loglog);
            break;
        }
    }
    p.validate();
    if (f != ProfileFamily::table) {
        const MdecReport md = check_mdec(p, log_grid(1e-4, 1e6, 200));
        if (!md.pass)
            throw ArgumentError("profile violates (alpha - sigma) m/r <= m' <= alpha m/r near r = " +
                                std::to_string(md.worst_r));
    }
    return p;
}

VelocityModel model_from_config(const Config& c, int d) {
    const VelocityKind k = parse_velocity_kind(c.get_string("model", "kind", d == 1 ? "burgers" : "sqg"));
    VelocityModel m;
    switch (k) {
        case VelocityKind::burgers: m = VelocityModel::burgers(); break;
        case VelocityKind::ccf: m = VelocityModel::ccf(); break;
        case VelocityKind::sqg: m = VelocityModel::sqg(); break;
        case VelocityKind::ipm2d: m = VelocityModel::ipm2d(); break;
        case VelocityKind::ipm3d_slice: m = VelocityModel::ipm3d_slice(); break;
        case VelocityKind::custom: {
            const auto a = c.get_array("model", "a");
            const auto flat = c.get_array("model", "psi");
            if (flat.size() % std::size_t(d)) throw ArgumentError("model.psi length must be a multiple of d");
            std::vector<std::vector<double>> psi;
            for (std::size_t i = 0; i < flat.size(); i += d) psi.emplace_back(flat.begin() + i, flat.begin() + i + d);
            m = VelocityModel::custom(a, psi);
            break;
        }
    }
    m.validate();
    if (m.dim() != d) throw ArgumentError("model." + velocity_kind_name(k) + " needs d = " + std::to_string(m.dim()));
    return m;
}

KernelSpec kernel_spec_from_config(const Config& c, const RadialProfile& p, int d) {
    KernelSpec s;
    s.profile = p;
    s.d = d;
    const double def_scale = (p.family != ProfileFamily::table && p.alpha > 0.0 && p.alpha < 2.0)
                                 ? fractional_laplacian_scale(d, p.alpha)
                                 : 1.0;
    s.scale = c.get_double("operator", "scale", def_scale);
    s.kcase = parse_case(c.get_string("operator", "case", "III"));
    s.c1 = c.get_double("operator", "c1", comparability_c1(s));
    s.tilde_alpha = c.get_double("operator", "tilde_alpha", p.alpha);
    if (s.kcase != KernelCase::III && !p.c0) throw ArgumentError("operator.case I/II needs profile.c0");
    return s;
}

LevyOperator operator_from_config(const Config& c, const KernelSpec& spec, const PeriodicGrid& g) {
    const std::string src = c.get_string("operator", "source", "multiplier");
    if (src == "multiplier") return symbol_from_multiplier(spec.profile, g);
    if (src == "kernel") return symbol_table_from_kernel(spec, g);
    if (src == "none") return zero_operator(g);
    throw ArgumentError("operator.source must be multiplier, kernel or none");
}

SolverConfig solver_from_config(const Config& c) {
    SolverConfig s;
    s.dt = c.get_double("solver", "dt", s.dt);
    s.t_end = c.get_double("solver", "t_end", s.t_end);
    s.epsilon = c.get_double("solver", "epsilon", s.epsilon);
    s.cfl_safety = c.get_double("solver", "cfl_safety", s.cfl_safety);
    s.record_every = int(c.get_int("solver", "record_every", s.record_every));
    s.adaptive_dt = c.get_bool("solver", "adaptive_dt", s.adaptive_dt);
    s.nonlinear = c.get_bool("solver", "nonlinear", s.nonlinear);
    s.dealias = c.get_bool("solver", "dealias", s.dealias);
    s.holder_beta = c.get_double("solver", "holder_beta", s.holder_beta);
    s.holder_stride = int(c.get_int("solver", "holder_stride", s.holder_stride));
    s.hs_s = c.get_double("solver", "hs_s", s.hs_s);
    s.blowup_grad = c.get_double("solver", "blowup_grad", s.blowup_grad);
    s.blowup_top_fraction = c.get_double("solver", "blowup_top_fraction", s.blowup_top_fraction);
    s.snapshot_dir = c.get_string("solver", "snapshot_dir", s.snapshot_dir);
    s.snapshot_every = int(c.get_int("solver", "snapshot_every", s.snapshot_every));
    const std::string scheme = c.get_string("solver", "scheme", "if_rk4");
    if (scheme != "if_rk4") throw ArgumentError("solver.scheme must be if_rk4");
    s.validate();
    return s;
}

Field random_band_field(const PeriodicGrid& g, int kmin, int kmax, double slope, double amplitude,
                        std::uint64_t seed) {
    if (kmin < 1 || kmax < kmin || kmax > g.N() / 3) throw ArgumentError("need 1 <= kmin <= kmax <= N/3");
    if (!(amplitude > 0.0)) throw ArgumentError("amplitude must be positive");
    SplitMix64 rng(seed);
    std::vector<cplx> spec(g.size(), cplx(0.0));
    const int N = g.N();
    auto idx = [&](int k1, int k2) {
        const std::size_t i1 = std::size_t((k1 + N) % N), i2 = std::size_t((k2 + N) % N);
        return g.d() == 1 ? i1 : i1 * N + i2;
    };
    // each conjugate pair drawn once, in a fixed enumeration order
    const int k2max = g.d() == 2 ? kmax : 0;
    for (int k1 = 0; k1 <= kmax; ++k1) {
        for (int k2 = -k2max; k2 <= k2max; ++k2) {
            if (k1 == 0 && k2 <= 0) continue;
            const double r = std::hypot(double(k1), double(k2));
            if (r < kmin || r > kmax) continue;
            const double a = std::pow(r, -slope);
            const cplx z(a * rng.normal(), a * rng.normal());
            spec[idx(k1, k2)] = z;
            spec[idx(-k1, -k2)] = std::conj(z);
        }
    }
    std::vector<double> v = inverse_transform(g, spec);
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::abs(x));
    if (!(mx > 0.0)) throw ArgumentError("random band produced a zero field");
    for (double& x : v) x *= amplitude / mx;
    return Field(g, std::move(v));
}

Field initial_from_config(const Config& c, const PeriodicGrid& g, std::uint64_t seed) {
    const std::string kind = c.get_string("initial", "kind", "sine");
    const double amp = c.get_double("initial", "amplitude", 1.0);
    if (kind == "sine" || kind == "cosine") {
        const double k1 = c.get_double("initial", "k1", 1.0), k2 = c.get_double("initial", "k2", 0.0);
        const double ph = kind == "cosine" ? 0.5 * kPi : 0.0;
        Field f(g);
        auto& v = f.mutable_values();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const int i1 = g.d() == 1 ? int(i) : int(i / g.N());
            const int i2 = g.d() == 1 ? 0 : int(i % g.N());
            v[i] = amp * std::sin(k1 * g.coord(i1) + k2 * g.coord(i2) + ph);
        }
        return f;
    }
    if (kind == "random_band") {
        return random_band_field(g, int(c.get_int("initial", "kmin", 1)), int(c.get_int("initial", "kmax", 8)),
                                 c.get_double("initial", "slope", 1.0), amp, seed);
    }
    if (kind == "file") {
        Field f = read_binary(c.get_string("initial", "path"));
        if (!(f.grid() == g)) throw ArgumentError("initial.path grid does not match [grid]");
        return f;
    }
    throw ArgumentError("initial.kind must be sine, cosine, random_band or file");
}

int run_experiment(const std::string& experiment, const Config& config, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    json manifest;
    manifest["experiment"] = experiment;
    manifest["seed"] = opt.seed;
    manifest["config"] = config.dump();
    manifest["versions"] = {{"ddlab", kVersion}, {"fftw", std::string(fftw_version)}, {"boost", std::string(BOOST_LIB_VERSION)}};
    int code = exit_pass;
    try {
        fs::create_directories(opt.output_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: output directory not writable: " << e.what() << "\n";
        return exit_validation;
    }
    try {
        Outcome o;
        if (experiment == "simulate")
            o = run_simulate(config, opt);
        else if (experiment == "moc_check")
            o = run_moc_check(config, opt);
        else if (experiment == "kernel_lab")
            o = run_kernel_lab(config, opt);
        else if (experiment == "criterion_grid")
            o = run_criterion_grid(config, opt);
        else if (experiment == "eventual_regularity")
            o = run_eventual(config, opt);
        else
            throw ArgumentError("unknown experiment " + experiment);
        manifest["recipe"] = o.recipe;
        manifest["summary"] = o.summary;
        manifest["pass"] = o.pass;
        code = o.pass ? exit_pass : exit_property_failure;
        json unused = config.unused_keys();
        if (!unused.empty()) manifest["unused_keys"] = unused;
    } catch (const ConvergenceError& e) {
        manifest["pass"] = false;
        manifest["error"] = {{"kind", "nonconvergence"}, {"message", e.what()}, {"partial_value", e.partial_value}};
        code = exit_nonconvergence;
    } catch (const ArgumentError& e) {
        manifest["pass"] = false;
        manifest["error"] = {{"kind", "validation"}, {"message", e.what()}};
        code = exit_validation;
    } catch (const std::exception& e) {
        manifest["pass"] = false;
        manifest["error"] = {{"kind", "nonconvergence"}, {"message", e.what()}};
        code = exit_nonconvergence;
    }
    manifest["exit_code"] = code;
    manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream(fs::path(opt.output_dir) / "manifest.json") << manifest.dump(2) << "\n";
    if (!opt.quiet) {
        std::cout << experiment << ": " << (code == exit_pass ? "pass" : "FAIL");
        if (manifest.contains("error")) std::cout << " (" << manifest["error"]["message"].get<std::string>() << ")";
        std::cout << "\n";
    }
    return code;
}

int report(const std::vector<std::string>& run_dirs, const std::string& output_dir, bool quiet) {
    fs::create_directories(output_dir);
    json out;
    out["runs"] = json::array();
    out["skipped"] = json::array();
    bool all = true;
    std::ofstream dat(fs::path(output_dir) / "report.dat");
    dat << "# index pass exit_code wall_seconds\n";
    int idx = 0;
    for (const auto& d : run_dirs) {
        const fs::path mp = fs::path(d) / "manifest.json";
        json m;
        try {
            if (!fs::exists(mp)) throw std::runtime_error("no manifest");
            m = read_json(mp);
        } catch (const std::exception& e) {
            out["skipped"].push_back({{"dir", d}, {"reason", e.what()}});
            continue;
        }
        const bool pass = m.value("pass", false);
        all = all && pass;
        out["runs"].push_back({{"dir", d},
                               {"experiment", m.value("experiment", "")},
                               {"recipe", m.value("recipe", "")},
                               {"pass", pass},
                               {"exit_code", m.value("exit_code", -1)},
                               {"wall_seconds", m.value("wall_seconds", 0.0)}});
        dat << idx++ << " " << (pass ? 1 : 0) << " " << m.value("exit_code", -1) << " " << m.value("wall_seconds", 0.0)
            << "\n";
    }
    out["overall_pass"] = all;
    out["count"] = out["runs"].size();
    std::ofstream(fs::path(output_dir) / "summary.json") << out.dump(2) << "\n";
    if (!quiet) std::cout << "report: " << out["runs"].size() << " runs, " << (all ? "pass" : "FAIL") << "\n";
    return all ? exit_pass : exit_property_failure;
}

}  // namespace ddl
