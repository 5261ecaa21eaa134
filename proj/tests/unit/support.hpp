#pragma once

#include <cmath>
#include <vector>

#include "ddl/config.hpp"
#include "ddl/spectral.hpp"

namespace gen {

inline double uniform(ddl::SplitMix64& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline int integer(ddl::SplitMix64& rng, int lo, int hi) {
    return lo + int(rng.next() % std::uint64_t(hi - lo + 1));
}

// Random trigonometric polynomial with modes |k_i| <= kmax.
inline ddl::Field trig_field(ddl::SplitMix64& rng, const ddl::PeriodicGrid& g, int kmax) {
    std::vector<double> v(g.size(), 0.0);
    const int terms = integer(rng, 1, 6);
    for (int t = 0; t < terms; ++t) {
        const int k1 = integer(rng, -kmax, kmax);
        const int k2 = g.d() == 2 ? integer(rng, -kmax, kmax) : 0;
        const double amp = uniform(rng, -1.0, 1.0), ph = uniform(rng, 0.0, 6.283185307179586);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const int i1 = g.d() == 2 ? int(i / g.N()) : int(i);
            const int i2 = g.d() == 2 ? int(i % g.N()) : 0;
            v[i] += amp * std::cos(k1 * g.coord(i1) + k2 * g.coord(i2) + ph);
        }
    }
    return ddl::Field(g, std::move(v));
}

inline ddl::Field from_function(const ddl::PeriodicGrid& g, double (*f)(double, double)) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const int i1 = g.d() == 2 ? int(i / g.N()) : int(i);
        const int i2 = g.d() == 2 ? int(i % g.N()) : 0;
        v[i] = f(g.coord(i1), g.coord(i2));
    }
    return ddl::Field(g, std::move(v));
}

}  // namespace gen
