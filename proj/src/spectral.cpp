#include "ddl/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "ddl/errors.hpp"

namespace ddl {

PeriodicGrid::PeriodicGrid(int d, int N) : d_(d), N_(N) {
    if (d != 1 && d != 2) throw ArgumentError("grid dimension must be 1 or 2");
    if (N < 8 || (N & (N - 1)) != 0) throw ArgumentError("grid size N must be a power of two >= 8");
    size_ = d == 1 ? static_cast<std::size_t>(N) : static_cast<std::size_t>(N) * N;
}

double PeriodicGrid::h() const { return 2.0 * std::numbers::pi / N_; }

void PeriodicGrid::wavevector(std::size_t idx, int& k1, int& k2) const {
    if (d_ == 1) {
        k1 = freq(static_cast<int>(idx));
        k2 = 0;
    } else {
        k1 = freq(static_cast<int>(idx / N_));
        k2 = freq(static_cast<int>(idx % N_));
    }
}

double PeriodicGrid::kmag(std::size_t idx) const {
    int k1, k2;
    wavevector(idx, k1, k2);
    return std::sqrt(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
}

namespace {

// One FFTW plan per (d, N, sign) with its own aligned buffer.
struct Plan {
    fftw_complex* buf = nullptr;
    fftw_plan plan = nullptr;
    std::mutex mu;
    std::size_t n = 0;
    ~Plan() {
        if (plan) fftw_destroy_plan(plan);
        if (buf) fftw_free(buf);
    }
};

Plan& get_plan(const PeriodicGrid& g, int sign) {
    static std::mutex registry_mu;
    static std::map<std::tuple<int, int, int>, std::unique_ptr<Plan>> registry;
    std::lock_guard<std::mutex> lock(registry_mu);
    auto key = std::make_tuple(g.d(), g.N(), sign);
    auto it = registry.find(key);
    if (it != registry.end()) return *it->second;
    auto p = std::make_unique<Plan>();
    p->n = g.size();
    p->buf = fftw_alloc_complex(p->n);
    if (g.d() == 1) {
        p->plan = fftw_plan_dft_1d(g.N(), p->buf, p->buf, sign, FFTW_ESTIMATE);
    } else {
        p->plan = fftw_plan_dft_2d(g.N(), g.N(), p->buf, p->buf, sign, FFTW_ESTIMATE);
    }
    Plan& ref = *p;
    registry.emplace(key, std::move(p));
    return ref;
}

}  // namespace

std::vector<cplx> transform(const PeriodicGrid& g, const std::vector<double>& values) {
    if (values.size() != g.size()) throw ArgumentError("field size does not match grid");
    Plan& p = get_plan(g, FFTW_BACKWARD);  // exp(+i k.x)
    std::lock_guard<std::mutex> lock(p.mu);
    for (std::size_t i = 0; i < p.n; ++i) {
        p.buf[i][0] = values[i];
        p.buf[i][1] = 0.0;
    }
    fftw_execute(p.plan);
    std::vector<cplx> out(p.n);
    const double scale = 1.0 / static_cast<double>(p.n);
    for (std::size_t i = 0; i < p.n; ++i) out[i] = cplx(p.buf[i][0], p.buf[i][1]) * scale;
    return out;
}

std::vector<double> inverse_transform(const PeriodicGrid& g, const std::vector<cplx>& spec) {
    if (spec.size() != g.size()) throw ArgumentError("spectrum size does not match grid");
    Plan& p = get_plan(g, FFTW_FORWARD);  // exp(-i k.x)
    std::lock_guard<std::mutex> lock(p.mu);
    for (std::size_t i = 0; i < p.n; ++i) {
        p.buf[i][0] = spec[i].real();
        p.buf[i][1] = spec[i].imag();
    }
    fftw_execute(p.plan);
    std::vector<double> out(p.n);
    for (std::size_t i = 0; i < p.n; ++i) out[i] = p.buf[i][0];
    return out;
}

Field::Field(const PeriodicGrid& g) : grid_(g), values_(g.size(), 0.0) {}

Field::Field(const PeriodicGrid& g, std::vector<double> values) : grid_(g), values_(std::move(values)) {
    if (values_.size() != g.size()) throw ArgumentError("field size does not match grid");
}

Field Field::from_spectral(const PeriodicGrid& g, std::vector<cplx> spec) {
    Field f(g, inverse_transform(g, spec));
    f.spec_ = std::move(spec);
    f.stale_ = false;
    return f;
}

double Field::at(int i1, int i2) const {
    const int N = grid_.N();
    i1 = ((i1 % N) + N) % N;
    if (grid_.d() == 1) return values_[i1];
    i2 = ((i2 % N) + N) % N;
    return values_[static_cast<std::size_t>(i1) * N + i2];
}

std::vector<double>& Field::mutable_values() {
    stale_ = true;
    return values_;
}

void Field::set(std::size_t i, double v) {
    values_[i] = v;
    stale_ = true;
}

const std::vector<cplx>& Field::spectral() const {
    if (stale_) {
        spec_ = transform(grid_, values_);
        stale_ = false;
    }
    return spec_;
}

bool dealias_keeps(const PeriodicGrid& g, std::size_t idx) {
    int k1, k2;
    g.wavevector(idx, k1, k2);
    const int cut = g.N() / 3;
    return std::abs(k1) <= cut && std::abs(k2) <= cut;
}

std::vector<cplx> dealias(const PeriodicGrid& g, std::vector<cplx> spec) {
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (!dealias_keeps(g, i)) spec[i] = 0.0;
    }
    return spec;
}

double norm_l2(const Field& f) {
    double s = 0.0;
    for (double v : f.values()) s += v * v;
    return std::sqrt(s / static_cast<double>(f.values().size()));
}

double norm_linf(const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double norm_hs(const Field& f, double s) {
    const auto& c = f.spectral();
    const auto& g = f.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double k = g.kmag(i);
        acc += std::pow(1.0 + k * k, s) * std::norm(c[i]);
    }
    return std::sqrt(acc);
}

double torus_distance(const PeriodicGrid& g, std::size_t i, std::size_t j) {
    const int N = g.N();
    auto axis = [N](int a, int b) {
        int o = std::abs(a - b);
        return std::min(o, N - o);
    };
    if (g.d() == 1) return g.h() * axis(static_cast<int>(i), static_cast<int>(j));
    const int a1 = static_cast<int>(i / N), a2 = static_cast<int>(i % N);
    const int b1 = static_cast<int>(j / N), b2 = static_cast<int>(j % N);
    const double o1 = axis(a1, b1), o2 = axis(a2, b2);
    return g.h() * std::sqrt(o1 * o1 + o2 * o2);
}

HolderEstimate holder_seminorm(const Field& f, double beta, int stride) {
    if (stride < 1) throw ArgumentError("stride must be >= 1");
    if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("Holder exponent must lie in (0,1)");
    const auto& g = f.grid();
    const int N = g.N();
    const int M = (N + stride - 1) / stride;
    const double h = g.h();
    // dist^{-beta} depends only on the per-axis index offset.
    std::vector<double> w1(N);
    for (int o = 0; o < N; ++o) w1[o] = static_cast<double>(std::min(o, N - o));
    HolderEstimate best;
    const auto& v = f.values();
    if (g.d() == 1) {
        std::vector<double> inv(N, 0.0);
        for (int o = 1; o < N; ++o) inv[o] = std::pow(h * w1[o], -beta);
        for (int a = 0; a < M; ++a) {
            const int ia = a * stride;
            for (int b = a + 1; b < M; ++b) {
                const int ib = b * stride;
                const double q = std::abs(v[ia] - v[ib]) * inv[ib - ia];
                if (q > best.value) best = {q, static_cast<std::size_t>(ia), static_cast<std::size_t>(ib)};
            }
        }
        return best;
    }
    std::vector<double> inv(static_cast<std::size_t>(N) * N, 0.0);
    for (int o1 = 0; o1 < N; ++o1) {
        for (int o2 = 0; o2 < N; ++o2) {
            if (o1 == 0 && o2 == 0) continue;
            const double d = h * std::sqrt(w1[o1] * w1[o1] + w1[o2] * w1[o2]);
            inv[static_cast<std::size_t>(o1) * N + o2] = std::pow(d, -beta);
        }
    }
    std::vector<std::size_t> pts;
    pts.reserve(static_cast<std::size_t>(M) * M);
    for (int a1 = 0; a1 < M; ++a1)
        for (int a2 = 0; a2 < M; ++a2) pts.push_back(static_cast<std::size_t>(a1 * stride) * N + a2 * stride);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const int a1 = static_cast<int>(pts[p] / N), a2 = static_cast<int>(pts[p] % N);
        const double va = v[pts[p]];
        for (std::size_t r = p + 1; r < pts.size(); ++r) {
            const int b1 = static_cast<int>(pts[r] / N), b2 = static_cast<int>(pts[r] % N);
            const int o1 = std::abs(a1 - b1), o2 = std::abs(a2 - b2);
            const double q = std::abs(va - v[pts[r]]) * inv[static_cast<std::size_t>(o1) * N + o2];
            if (q > best.value) best = {q, pts[p], pts[r]};
        }
    }
    return best;
}

namespace {

bool in_block(double k, int q) {
    // The |k| = 1 shell goes to block 0 only, so the blocks partition the modes.
    if (q == -1) return k < 1.0;
    const double hi = std::ldexp(1.0, q);
    return k > 0.5 * hi && k <= hi;
}

}  // namespace

int lp_block_count(const PeriodicGrid& g) {
    const double kmax = 0.5 * g.N() * std::sqrt(static_cast<double>(g.d()));
    int q = 0;
    while (std::ldexp(1.0, q) < kmax) ++q;
    return q + 2;  // blocks -1..q
}

Field lp_block(const Field& f, int q) {
    if (q < -1) throw ArgumentError("Littlewood-Paley index must be >= -1");
    const auto& g = f.grid();
    std::vector<cplx> c = f.spectral();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!in_block(g.kmag(i), q)) c[i] = 0.0;
    }
    return Field::from_spectral(g, std::move(c));
}

double besov_norm(const Field& f, double s, double p, double r) {
    const bool p_inf = std::isinf(p), r_inf = std::isinf(r);
    if (!(p_inf || p == 2.0) || !(r_inf || r == 2.0)) throw ArgumentError("Besov indices p, r must be 2 or infinity");
    const int nb = lp_block_count(f.grid());
    double acc = 0.0;
    for (int q = -1; q < nb - 1; ++q) {
        Field b = lp_block(f, q);
        const double lp = p_inf ? norm_linf(b) : norm_l2(b);
        const double term = std::pow(2.0, q * s) * lp;
        acc = r_inf ? std::max(acc, term) : acc + term * term;
    }
    return r_inf ? acc : std::sqrt(acc);
}

void write_csv(const Field& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ArgumentError("cannot open " + path);
    os.precision(17);
    const auto& g = f.grid();
    const int N = g.N();
    if (g.d() == 1) {
        os << "x,value\n";
        for (int i = 0; i < N; ++i) os << g.coord(i) << ',' << f[i] << '\n';
    } else {
        os << "x,y,value\n";
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) os << g.coord(i) << ',' << g.coord(j) << ',' << f.at(i, j) << '\n';
    }
}

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
    unsigned char b[sizeof(T)];
    std::uint64_t u = 0;
    static_assert(sizeof(T) <= 8);
    std::memcpy(&u, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char b[sizeof(T)];
    is.read(reinterpret_cast<char*>(b), sizeof(T));
    if (!is) throw ArgumentError("truncated binary field file");
    std::uint64_t u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    T v;
    std::memcpy(&v, &u, sizeof(T));
    return v;
}

}  // namespace

void write_binary(const Field& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ArgumentError("cannot open " + path);
    put_le<std::int32_t>(os, f.grid().d());
    put_le<std::int32_t>(os, f.grid().N());
    for (double v : f.values()) put_le<double>(os, v);
}

Field read_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ArgumentError("cannot open " + path);
    const int d = get_le<std::int32_t>(is);
    const int N = get_le<std::int32_t>(is);
    PeriodicGrid g(d, N);
    std::vector<double> v(g.size());
    for (auto& x : v) x = get_le<double>(is);
    return Field(g, std::move(v));
}

}  // namespace ddl
