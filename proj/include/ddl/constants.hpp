#pragma once

#include <cmath>

#include "ddl/radial.hpp"

namespace ddl {

// Constants entering the breakthrough inequalities.
//   C1, C1p   dissipation: D <= C1p omega + C1 (integrals of second differences)
//   C2, C2p   drift:       Omega <= (C2 + C2p) omega + C2 (two integral terms)
//   C0        sup of s log(1/s) on (0, 1], = 1/e
//   c_tilde   inf of (2^x - 1)/x on (0, 1], = log 2
struct CriterionConstants {
    double C1 = 1.0;
    double C2 = 1.0;
    double C1p = 0.0;
    double C2p = 0.0;
    double C0 = std::exp(-1.0);
    double c_tilde = std::log(2.0);
    KernelCase kcase = KernelCase::III;
};

}  // namespace ddl
