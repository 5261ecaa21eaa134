#pragma once

#include <string>
#include <vector>

#include "ddl/spectral.hpp"

namespace ddl {

enum class VelocityKind { burgers, ccf, sqg, ipm2d, ipm3d_slice, custom };

// u = a theta + p.v. int S(y) theta(x + y) dy with S(y) = Psi(y/|y|) / |y|^d,
// realized as the Fourier multiplier P^(k) acting on theta^(k).
//
// Sign conventions (with f(x) = sum f^(k) e^{-ik.x}):
//   ccf  P^ = -i sgn(k)           so H sin = cos
//   sqg  P^ = (i k2, -i k1) / |k|  so u = grad^perp (-Delta)^{-1/2} theta
// ipm3d_slice is the k2 = 0 slice of the three-dimensional model, with grid
// axis 2 playing the role of x3; the returned components are (u1, u3).
//
// For custom models Psi is sampled on the unit sphere: at {+1, -1} in d = 1,
// at angles 2 pi (m + 1/2) / M in d = 2. psi[m] holds the d components.
struct VelocityModel {
    VelocityKind kind = VelocityKind::burgers;
    std::vector<double> a;
    std::vector<std::vector<double>> psi;

    static VelocityModel burgers();
    static VelocityModel ccf();
    static VelocityModel sqg();
    static VelocityModel ipm2d();
    static VelocityModel ipm3d_slice();
    static VelocityModel custom(std::vector<double> a, std::vector<std::vector<double>> psi);

    int dim() const;
    void validate() const;
};

VelocityKind parse_velocity_kind(const std::string& s);
std::string velocity_kind_name(VelocityKind k);

// sup |Psi| for the model's kernel representation (0 for Burgers).
double psi_max(const VelocityModel& m);
double a_norm(const VelocityModel& m);

std::vector<cplx> velocity_symbol(const VelocityModel& m, int k1, int k2 = 0);

// One Field per velocity component. Spectral data are symmetrized so the
// output is exactly real.
std::vector<Field> apply_velocity(const VelocityModel& m, const Field& theta);

double divergence_residual(const VelocityModel& m, const Field& theta);

// |a| + max |P^(k)| over the grid's modes.
double velocity_l2_bound(const VelocityModel& m, const PeriodicGrid& g);

struct CrosscheckReport {
    double max_abs = 0.0;
    double max_rel = 0.0;    // max_abs / max |u| of the multiplier result
    double u_max = 0.0;
    int near_nodes = 0;
    long far_points = 0;
};

// IPM velocity from its kernel form, a = (0, 1/2) and
// S(x) = (2 x1 x2, x2^2 - x1^2) / (2 pi |x|^4), compared with the multiplier.
// The zero mode is carried by a on both sides.
CrosscheckReport ipm_kernel_crosscheck(const Field& theta);

}  // namespace ddl
