#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddl/constants.hpp"
#include "ddl/moc.hpp"
#include "ddl/quadrature.hpp"
#include "ddl/radial.hpp"
#include "ddl/spectral.hpp"
#include "ddl/velocity.hpp"

namespace ddl {

// Two-sided comparability constant of K against m(1/|y|)/|y|^d.
double comparability_c1(const KernelSpec& spec);

// C1 = min over an eta grid of Ktilde(eta) eta / m(1/eta), with Ktilde the
// kernel integrated over the d-1 transverse directions (Ktilde = K in d = 1).
// C2 = |a| + 2 c1 max|Psi|. Case II adds tail constants computed from the
// |y|^{-d-tilde_alpha} decay beyond c0.
CriterionConstants estimate_constants(const KernelSpec& spec, const VelocityModel& model,
                                      const QuadratureParams& q = {});

// Minimum of Ktilde(eta) eta / m(1/eta) over the supplied grid.
double ktilde_ratio_min(const KernelSpec& spec, const std::vector<double>& eta_grid, const QuadratureParams& q = {});

// Upper bound on D at separation xi: two second-difference integrals weighted
// by m(1/eta)/eta, the outer one ending at c0/2 for Cases I-II and at infinity
// for Case III, plus C1p omega in Case II.
double dissipation_bound(const Moc& moc, double xi, const CriterionConstants& c, const QuadratureParams& q = {});

// xi int_xi^inf omega(eta) / eta^2 d eta
double drift_tail_integral(const Moc& moc, double xi, const QuadratureParams& q = {});

// -C2 D / m(1/xi) + (C2 + C2p) omega(xi) + C2 xi int_xi^inf omega / eta^2
double drift_bound(const Moc& moc, double xi, const CriterionConstants& c, double D, const QuadratureParams& q = {});

struct MarginResult {
    double margin = 0.0;       // dt omega - (Omega_b omega' + D_b + 2 eps omega'')
    double D_bound = 0.0;
    double Omega_bound = 0.0;  // with D_b substituted for D
    double dt_omega = 0.0;
    double d_omega = 0.0;      // larger one-sided derivative
    double d2_omega = 0.0;     // larger one-sided second derivative
    bool substitution_ok = true;  // 1 - C2 omega' / m(1/xi) > 0
};

// Positive margin means the breakthrough inequality holds at (xi, xi0). Only
// xi with omega(xi) <= 2 B0 are admissible when B0 is given.
MarginResult criterion_margin(const Moc& moc, double xi, double xi0, double epsilon, const CriterionConstants& c,
                              std::optional<double> B0 = std::nullopt, const QuadratureParams& q = {});

struct MarginRow {
    double xi = 0.0;
    double xi0 = 0.0;
    MarginResult r;
};

void write_margin_csv(const std::vector<MarginRow>& rows, bool with_xi0, const std::string& path);

struct Scenario {
    std::size_t x = 0;
    double angle = 0.0;  // direction of e (0 or pi in d = 1)
    double xi = 0.0;
    double ratio = 0.0;  // (theta(x) - theta(x + xi e)) / omega*(xi)
    double D_exact = 0.0;
    double D_bound = 0.0;
    double Omega_exact = 0.0;
    double Omega_bound = 0.0;
    bool D_ok = true;
    bool Omega_ok = true;
};

struct AuditReport {
    double r_star = 0.0;  // max ratio to omega over the sampled pairs; omega* = r_star omega
    std::vector<Scenario> scenarios;
    bool pass = true;
    double worst_D_excess = 0.0;      // max (D_exact - D_bound) / |D_bound|
    double worst_Omega_excess = 0.0;  // max (Omega_exact - Omega_bound) / |Omega_bound|
};

struct AuditOptions {
    int stride = 1;         // separations are multiples of stride * h
    int max_offset = 0;     // largest separation in grid units; 0 means N/4
    int angles = 16;        // directions in d = 2
    double near = 0.9;      // scenario threshold on ratio / r_star
    double slack = 1e-3;
    std::size_t max_scenarios = 4000;
};

// Scales the MOC so the field touches it, collects near-saturating pairs and
// compares the exact D and Omega at each with their bounds.
AuditReport scenario_audit(const Field& theta, const Moc& moc, const VelocityModel& model, const LevyOperator& op,
                           const CriterionConstants& c, const AuditOptions& opt = {});

void write_audit_json(const AuditReport& r, const std::string& path);

}  // namespace ddl
