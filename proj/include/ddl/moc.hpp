#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ddl/constants.hpp"
#include "ddl/radial.hpp"
#include "ddl/spectral.hpp"

namespace ddl {

enum class MocFamily { stationary, eventual };

struct MocParams {
    double kappa = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
    double beta = 0.5;
    double rho = 0.0;
    double A0 = 0.0;
    double c_cut = std::numeric_limits<double>::infinity();  // stationary plateau start
    RadialProfile profile;
};

struct MocEval {
    double value = 0.0;
    double d_minus = 0.0;   // one-sided derivatives in xi
    double d_plus = 0.0;
    double d2_minus = 0.0;  // one-sided second derivatives
    double d2_plus = 0.0;
    double d_xi0 = 0.0;     // partial derivative in xi0 (eventual family)
};

// I(xi) = int_delta^xi m(1/eta) d eta, tabulated on a log grid and evaluated by
// cubic Hermite interpolation with the exact integrand as derivative data.
class MocIntegralCache {
public:
    MocIntegralCache(const RadialProfile& p, double delta, double xi_max, int nodes = 2048);
    double operator()(double xi) const;
    double delta() const { return delta_; }
    double xi_max() const { return xi_max_; }

private:
    double integrate_tail(double xi) const;

    RadialProfile p_;
    double delta_;
    double xi_max_ = 0.0;
    std::vector<double> xs_, is_, fs_;
};

// Stationary: power law below delta, log-type growth up to c_cut, plateau after.
// Eventual:   the tangent-line family indexed by xi0; xi0 <= 0 reduces to the
//             stationary shape with no plateau.
class Moc {
public:
    Moc(MocFamily family, const MocParams& params, double xi0 = 0.0, double cache_max = 0.0);

    MocFamily family() const { return family_; }
    const MocParams& params() const { return p_; }
    double xi0() const { return xi0_; }
    // Same shape at another xi0, sharing the integral cache.
    Moc with_xi0(double xi0) const;

    double omega(double xi) const;
    MocEval eval(double xi) const;
    double omega_zero_plus() const;
    double integral(double xi) const;  // int_delta^xi m(1/eta) d eta

private:
    MocFamily family_;
    MocParams p_;
    double xi0_;
    double md_;  // m(1/delta)
    std::shared_ptr<const MocIntegralCache> cache_;
};

struct ShapeReport {
    bool pass = true;
    bool monotone = true;
    bool concave = true;
    bool holder_ratio = true;  // omega(xi)/xi^beta nonincreasing
    bool jump_sign = true;     // omega'(delta-) >= omega'(delta+)
    double worst = 0.0;
    double worst_xi = 0.0;
};

ShapeReport validate_shape(const Moc& moc, const std::vector<double>& xi_grid, double tol = 1e-10);

struct Inequality {
    std::string label;
    double value = 0.0;
    double bound = 0.0;
    bool strict = true;
    bool holds() const { return strict ? value < bound : value <= bound; }
};

struct Coefficients {
    double kappa = 0.0, gamma = 0.0, rho = 0.0;
    double kappa_max = 0.0, gamma_max = 0.0, rho_max = 0.0;
    std::vector<Inequality> checks;  // every encoded condition, re-evaluated at the chosen values
    bool all_hold() const;
};

// Largest admissible (kappa, gamma, rho) scaled by 1/2: kappa first, then gamma
// given kappa, then rho. Stationary selections leave rho = 0.
Coefficients select_coefficients(double alpha, double sigma, double beta, const CriterionConstants& c,
                                 MocFamily family);
// Re-evaluates the encoded inequalities at arbitrary values.
std::vector<Inequality> coefficient_conditions(double alpha, double sigma, double beta, const CriterionConstants& c,
                                               MocFamily family, double kappa, double gamma, double rho);

// xi0(t) solving xi0' = -rho m(1/xi0) xi0, xi0(0) = A0, clamped at 0.
// Power-law profiles use the closed form unless force_ode is set.
double xi0_solve(const MocParams& params, double t, bool force_ode = false);
double xi0_closed_form(double A0, double alpha, double rho, double t);

struct T1Report {
    double t1_est = 0.0;           // 1 / ((alpha - sigma) rho m(1/A0)); closed form for power law
    bool power_law_closed = false;
    double t1_closed = 0.0;        // A0^alpha / (alpha rho)
    std::optional<double> t1_explicit;  // C/(1-beta) (4(1-alpha)/(alpha gamma))^{alpha/(1-alpha)} |theta0|^{alpha/(1-alpha)}
};

T1Report eventual_time_t1(const MocParams& params, std::optional<double> theta_linf = std::nullopt,
                          std::optional<double> C = std::nullopt);

// sup over t >= t1 of the Holder seminorm allowed by the stationary shape.
double holder_cap(const MocParams& params);

struct ObeyReport {
    bool pass = true;
    double worst_ratio = 0.0;  // max |f(x) - f(y)| / omega(|x - y|)
    std::size_t worst_i = 0, worst_j = 0;
    double worst_dist = 0.0;
};

ObeyReport obeys_moc(const Field& f, const Moc& moc, int stride = 1, double slack = 1e-12);

struct FitResult {
    double delta = 0.0;
    double A0 = 0.0;
    double linf = 0.0;
    double holder = 0.0;
    double condition_value = 0.0;  // left side of the sufficient condition
    double condition_bound = 0.0;  // 2 |theta0|_inf
    int iterations = 0;
    bool closed_form = false;
};

// Stationary: halves delta and then bisects until the field obeys omega and
// omega(a0) >= 1.05 * 2 |theta0|_inf. Eventual: grows A0 until the zero-limit
// condition holds with the same margin; power law with sigma = 0 uses the
// closed forms for (A0, delta).
FitResult initial_fit(const Field& theta0, MocFamily family, const RadialProfile& profile, double beta,
                      const Coefficients& coef, double c_cut = std::numeric_limits<double>::infinity(),
                      int stride = 0);

// True when int_0 m(1/xi) d xi diverges for the analytic families.
std::optional<bool> integral_diverges(const RadialProfile& p);

int ncond(double alpha, double sigma);

void write_moc_csv(const Moc& moc, const std::vector<double>& xi_grid, const std::string& path);

}  // namespace ddl
