#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddl/quadrature.hpp"
#include "ddl/spectral.hpp"

namespace ddl {

enum class ProfileFamily { power, power_log, power_loglog, table };
enum class TableInterp { linear, loglog };

// The radial function m controlling kernel strength and symbol growth.
//   power:        m(r) = r^alpha
//   power_log:    m(r) = r^alpha / log(lambda + r)^mu
//   power_loglog: m(r) = r / (log(lambda + r) * log(log(lambda2 + r))^mu)
//   table:        sampled (r, m) pairs, interpolated
// c0 absent means the differential inequality is claimed for every r > 0.
struct RadialProfile {
    ProfileFamily family = ProfileFamily::power;
    double alpha = 1.0;
    double sigma = 0.0;
    std::optional<double> c0;
    double mu = 0.0;
    double lambda = 0.0;
    double lambda2 = 0.0;
    std::vector<double> table_r;
    std::vector<double> table_m;
    TableInterp interp = TableInterp::loglog;

    static RadialProfile power(double alpha);
    static RadialProfile power_log(double alpha, double mu, double lambda, double sigma,
                                   std::optional<double> c0 = std::nullopt);
    static RadialProfile power_loglog(double mu, double lambda1, double lambda2, double sigma,
                                      std::optional<double> c0 = std::nullopt);
    static RadialProfile table(std::vector<double> r, std::vector<double> m, double alpha, double sigma,
                               std::optional<double> c0 = std::nullopt,
                               TableInterp interp = TableInterp::loglog);

    void validate() const;
    std::string describe() const;
};

ProfileFamily parse_family(const std::string& s);
std::string family_name(ProfileFamily f);

double eval_m(const RadialProfile& p, double r);
// m'(r); closed form for analytic families, central difference for tables.
double eval_dm(const RadialProfile& p, double r);

struct MdecReport {
    bool pass = true;
    double worst_margin = 0.0;  // min over the grid of the two normalized margins
    double worst_r = 0.0;
};

// Checks (alpha - sigma) m/r <= m' <= alpha m/r with m' from central differences
// (relative step 1e-4). Margins are normalized by m/r; pass when >= -tol.
MdecReport check_mdec(const RadialProfile& p, const std::vector<double>& r_grid, double tol = 1e-6);

struct MonotoneReport {
    bool pass = true;
    bool increasing_ok = true;   // r^{beta1} m(1/r) nondecreasing
    bool decreasing_ok = true;   // r^{beta2} m(1/r) nonincreasing
    double worst_violation = 0.0;
    double worst_r = 0.0;
};

MonotoneReport monotone_maps_check(const RadialProfile& p, double beta1, double beta2,
                                   const std::vector<double>& r_grid, double tol = 1e-12);

enum class KernelCase { I, II, III };

// Radial kernel K(y) = scale * m(1/|y|) / |y|^d. The canonical representative
// has scale = 1 (so c1 = 1); multiplier-defined operators such as |D|^alpha
// carry their own normalization.
struct KernelSpec {
    RadialProfile profile;
    double c1 = 1.0;
    double tilde_alpha = 1.0;
    KernelCase kcase = KernelCase::III;
    int d = 1;
    double scale = 1.0;
};

double kernel_value(const KernelSpec& spec, double r);

// Normalization C with (-Delta)^{alpha/2} f = C p.v. int (f(x) - f(x+y)) |y|^{-d-alpha} dy.
double fractional_laplacian_scale(int d, double alpha);

enum class SymbolProvenance { multiplier, kernel_quadrature };

struct LevyOperator {
    PeriodicGrid grid;
    std::vector<double> symbol;  // same flat layout as the spectral coefficients
    SymbolProvenance provenance = SymbolProvenance::multiplier;

    int d() const { return grid.d(); }
};

LevyOperator symbol_from_multiplier(const RadialProfile& p, const PeriodicGrid& g);

// A zero operator on the grid (pure transport runs).
LevyOperator zero_operator(const PeriodicGrid& g);

struct SymbolValue {
    double value = 0.0;
    double error = 0.0;
};

// A(zeta) = int (1 - cos(zeta.y)) K(y) dy by split singular quadrature.
SymbolValue symbol_from_kernel(const KernelSpec& spec, const std::vector<double>& zeta,
                               const QuadratureParams& q = {});

LevyOperator symbol_table_from_kernel(const KernelSpec& spec, const PeriodicGrid& g,
                                      const QuadratureParams& q = {});

void write_symbol_csv(const LevyOperator& op, const std::string& path);

struct KernelSample {
    std::vector<double> radii;
    std::vector<double> K;
    std::vector<double> decay_exponent;  // local slope d log K / d log r between neighbours
    bool nonnegative = true;
    double max_K = 0.0;
    double min_K = 0.0;
    double c5 = 0.0;  // min of K(r) r / m(1/r) over radii <= c0 (all radii when c0 absent)
};

// d = 1 inversion of the symbol m(|zeta|): K(r) = (1/(pi r)) int (m W)'(zeta) sin(zeta r) dzeta,
// with W a raised-cosine window over the top octave [zeta_max/2, zeta_max].
// Radii with r * zeta_max < 64 are rejected as unresolved.
KernelSample kernel_from_multiplier(const RadialProfile& p, const std::vector<double>& radii, double zeta_max);

struct SymbolFit {
    double C_low = 0.0;
    double C_off = 0.0;
    bool pure_power_form = false;  // A(k) >= C_low |k|^alpha with C_off = 0
};

// C_low is the smallest ratio A(k)/|k|^{alpha-sigma} over the top octave of modes;
// C_off is then the smallest offset making the bound hold on every mode.
// Offsets below noise_floor * C_low * max|k|^{alpha-sigma} are reported as 0.
SymbolFit symbol_lower_bound_fit(const LevyOperator& op, double alpha, double sigma, double noise_floor = 0.0);

}  // namespace ddl
