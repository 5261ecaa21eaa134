#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace ddl {

using cplx = std::complex<double>;

// Uniform periodic grid on [0, 2pi)^d, d in {1, 2}, N points per axis.
// Storage is row-major: index = i1 * N + i2 in d = 2, with i1 along x1.
class PeriodicGrid {
public:
    PeriodicGrid(int d, int N);

    int d() const { return d_; }
    int N() const { return N_; }
    double h() const;
    std::size_t size() const { return size_; }

    // Signed frequency of FFT index j along one axis; index N/2 maps to -N/2.
    int freq(int j) const { return j < N_ / 2 ? j : j - N_; }
    // Integer wavevector of the flat spectral index (second entry 0 when d = 1).
    void wavevector(std::size_t idx, int& k1, int& k2) const;
    double kmag(std::size_t idx) const;
    double coord(int i) const { return h() * i; }

    bool operator==(const PeriodicGrid& o) const { return d_ == o.d_ && N_ == o.N_; }

private:
    int d_;
    int N_;
    std::size_t size_;
};

// Coefficients follow f^(k) = N^{-d} sum_j f(x_j) exp(+i k.x_j), so that
// f(x) = sum_k f^(k) exp(-i k.x). A pure cos(kx) has weight 1/2 at +-k and
// Parseval reads mean(f^2) = sum |f^(k)|^2. Spatial derivative d/dx_j has
// symbol -i k_j under this convention.
std::vector<cplx> transform(const PeriodicGrid& g, const std::vector<double>& values);
std::vector<double> inverse_transform(const PeriodicGrid& g, const std::vector<cplx>& spec);

class Field {
public:
    explicit Field(const PeriodicGrid& g);
    Field(const PeriodicGrid& g, std::vector<double> values);
    static Field from_spectral(const PeriodicGrid& g, std::vector<cplx> spec);

    const PeriodicGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double at(int i1, int i2 = 0) const;

    // Mutable access marks the spectral cache stale.
    std::vector<double>& mutable_values();
    void set(std::size_t i, double v);

    const std::vector<cplx>& spectral() const;
    bool spectral_stale() const { return stale_; }

private:
    PeriodicGrid grid_;
    std::vector<double> values_;
    mutable std::vector<cplx> spec_;
    mutable bool stale_ = true;
};

// Two-thirds rule: zero every mode with some |k_i| > N/3.
std::vector<cplx> dealias(const PeriodicGrid& g, std::vector<cplx> spec);
bool dealias_keeps(const PeriodicGrid& g, std::size_t idx);

double norm_l2(const Field& f);
double norm_linf(const Field& f);
double norm_hs(const Field& f, double s);

struct HolderEstimate {
    double value = 0.0;
    std::size_t i = 0;  // achieving pair (flat indices)
    std::size_t j = 0;
};

// Torus distance: per-axis min(|dx|, 2pi - |dx|), Euclidean in d = 2.
double torus_distance(const PeriodicGrid& g, std::size_t i, std::size_t j);

// Maximum of |f(x)-f(y)| / dist^beta over all pairs drawn from the subgrid
// with spacing `stride`; a lower bound for the true seminorm.
HolderEstimate holder_seminorm(const Field& f, double beta, int stride = 1);

// Sharp dyadic blocks: q = -1 keeps |k| < 1 (the mean), q >= 0 keeps
// 2^{q-1} < |k| <= 2^q. The blocks sum to f exactly.
Field lp_block(const Field& f, int q);
int lp_block_count(const PeriodicGrid& g);

// Sequence norm || 2^{qs} ||Delta_q f||_{L^p} ||_{l^r} for p, r in {2, inf}.
double besov_norm(const Field& f, double s, double p, double r);

void write_csv(const Field& f, const std::string& path);
// Little-endian: int32 d, int32 N, then N^d float64 values in row-major order.
void write_binary(const Field& f, const std::string& path);
Field read_binary(const std::string& path);

}  // namespace ddl
