#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace siegel {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr double pi = std::numbers::pi;

// error kinds carried by every exception the library throws
enum class errc {
    config,
    degenerate,
    singular_derivative,
    projection_singular,
    differential_singular,
    degenerate_scaling,
    degenerate_line,
    spectral,
    basis,
    ordering,
    coordinate_change,
    projection,
};

struct error : std::runtime_error {
    errc kind;
    double value = 0.0;
    error(errc k, const std::string& what, double v = 0.0)
        : std::runtime_error(what), kind(k), value(v) {}
};

struct Disk {
    cplx c;
    double r = 1.0;
    Disk() = default;
    Disk(cplx c_, double r_) : c(c_), r(r_) {
        if (!(r_ > 0)) throw error(errc::config, "disk radius must be positive");
    }
    cplx scaled(cplx z) const { return (z - c) / r; }
    cplx unscaled(cplx t) const { return c + r * t; }
    bool contains(cplx z) const { return std::abs(z - c) < r; }
};

// f(z) = sum a_k ((z-c)/r)^k
struct TaylorDisk {
    Disk dom;
    cvec a;

    TaylorDisk() = default;
    TaylorDisk(Disk d, cvec coeffs) : dom(d), a(std::move(coeffs)) {}
    TaylorDisk(Disk d, int n) : dom(d), a(n + 1, cplx(0)) {}

    int order() const { return int(a.size()) - 1; }
};

// ---- raw coefficient arithmetic, truncated at n ----

inline cvec mul(const cvec& x, const cvec& y, int n) {
    cvec z(n + 1, cplx(0));
    int nx = std::min<int>(int(x.size()) - 1, n);
    for (int i = 0; i <= nx; ++i) {
        if (x[i] == cplx(0)) continue;
        int ny = std::min<int>(int(y.size()) - 1, n - i);
        for (int j = 0; j <= ny; ++j) z[i + j] += x[i] * y[j];
    }
    return z;
}

inline cvec resized(cvec x, int n) {
    x.resize(n + 1, cplx(0));
    return x;
}

inline cplx horner(const cvec& a, cplx t) {
    cplx s(0);
    for (int k = int(a.size()) - 1; k >= 0; --k) s = s * t + a[k];
    return s;
}

// value, first and second derivative in the scaled variable
inline void horner2(const cvec& a, cplx t, cplx& f, cplx& d1, cplx& d2) {
    f = d1 = d2 = cplx(0);
    for (int k = int(a.size()) - 1; k >= 0; --k) {
        d2 = d2 * t + 2.0 * d1;
        d1 = d1 * t + f;
        f = f * t + a[k];
    }
}

// sum a_k g^k by Horner in series arithmetic, all truncated at n
inline cvec horner_series(const cvec& a, const cvec& g, int n) {
    cvec r(n + 1, cplx(0));
    if (a.empty()) return r;
    r[0] = a.back();
    for (int k = int(a.size()) - 2; k >= 0; --k) {
        r = mul(r, g, n);
        r[0] += a[k];
    }
    return r;
}

// g^0..g^kmax truncated at n
inline std::vector<cvec> powers(const cvec& g, int kmax, int n) {
    std::vector<cvec> p(kmax + 1);
    p[0].assign(n + 1, cplx(0));
    p[0][0] = 1.0;
    for (int k = 1; k <= kmax; ++k) p[k] = mul(p[k - 1], g, n);
    return p;
}

// ---- TaylorDisk operations ----

inline TaylorDisk constant(Disk d, int n, cplx v) {
    TaylorDisk f(d, n);
    f.a[0] = v;
    return f;
}

inline TaylorDisk identity(Disk d, int n) {
    TaylorDisk f(d, n);
    f.a[0] = d.c;
    if (n >= 1) f.a[1] = d.r;
    return f;
}

// z^k on disk d, expanded in the scaled variable
inline cvec zpow(Disk d, int k, int n) {
    cvec lin{d.c, d.r};
    cvec out(n + 1, cplx(0));
    out[0] = 1.0;
    for (int i = 0; i < k; ++i) out = mul(out, lin, n);
    return out;
}

inline cplx evaluate(const TaylorDisk& f, cplx z) { return horner(f.a, f.dom.scaled(z)); }

inline cplx evaluate_d1(const TaylorDisk& f, cplx z) {
    cplx v, d1, d2;
    horner2(f.a, f.dom.scaled(z), v, d1, d2);
    return d1 / f.dom.r;
}

inline cplx evaluate_d2(const TaylorDisk& f, cplx z) {
    cplx v, d1, d2;
    horner2(f.a, f.dom.scaled(z), v, d1, d2);
    return d2 / (f.dom.r * f.dom.r);
}

inline double l1(const cvec& a) {
    double s = 0;
    for (auto& x : a) s += std::abs(x.real()) + std::abs(x.imag());
    return s;
}
inline double l1(const TaylorDisk& f) { return l1(f.a); }

inline double sup_estimate(const TaylorDisk& f, int grid = 512) {
    double m = 0;
    for (int j = 0; j < grid; ++j) {
        cplx t = std::polar(1.0, 2 * pi * j / grid);
        m = std::max(m, std::abs(horner(f.a, t)));
    }
    return m;
}

// advisory: norm bound of g's range against f's disk
inline bool range_ok(const TaylorDisk& f, const TaylorDisk& g) {
    cplx g0 = g.a.empty() ? cplx(0) : g.a[0];
    double spread = l1(g.a) - (std::abs(g0.real()) + std::abs(g0.imag()));
    return std::abs(g0 - f.dom.c) + spread <= f.dom.r;
}

// f o g, output on g's disk at order n
inline TaylorDisk compose_to(const TaylorDisk& f, const TaylorDisk& g, int n) {
    cvec inner = resized(g.a, n);
    inner[0] -= f.dom.c;
    for (auto& x : inner) x /= f.dom.r;
    return TaylorDisk(g.dom, horner_series(f.a, inner, n));
}

inline TaylorDisk compose(const TaylorDisk& f, const TaylorDisk& g, bool* range_warning = nullptr) {
    if (f.order() != g.order())
        throw error(errc::config, "compose: truncation orders differ");
    if (range_warning) *range_warning = !range_ok(f, g);
    return compose_to(f, g, g.order());
}

// re-expand f on another disk (exact for polynomials up to truncation)
inline TaylorDisk recentre(const TaylorDisk& f, Disk d, int n) {
    return compose_to(f, identity(d, 1), n);
}

inline TaylorDisk derivative(const TaylorDisk& f, int k) {
    if (k < 1 || k > f.order())
        throw error(errc::degenerate, "derivative order out of range");
    int n = f.order() - k;
    TaylorDisk g(f.dom, n);
    double rk = std::pow(f.dom.r, k);
    for (int j = 0; j <= n; ++j) {
        double m = 1;
        for (int i = 1; i <= k; ++i) m *= double(j + i);
        g.a[j] = f.a[j + k] * m / rk;
    }
    return g;
}

// z -> conj(f(conj z))
inline TaylorDisk conj_variable(const TaylorDisk& f) {
    TaylorDisk g(Disk(std::conj(f.dom.c), f.dom.r), f.a);
    for (auto& x : g.a) x = std::conj(x);
    return g;
}

// coefficients of f(x0 + h) in powers of h, k = 0..K
inline cvec taylor_at(const TaylorDisk& f, cplx x0, int K) {
    cvec b = f.a;
    cplx t0 = f.dom.scaled(x0);
    int n = int(b.size()) - 1;
    // repeated synthetic division by (t - t0)
    for (int k = 0; k <= std::min(K, n); ++k)
        for (int j = n - 1; j >= k; --j) b[j] += t0 * b[j + 1];
    cvec out(K + 1, cplx(0));
    double s = 1;
    for (int k = 0; k <= std::min(K, n); ++k) {
        out[k] = b[k] / s;
        s *= f.dom.r;
    }
    return out;
}

// ---- nonlinearity ----

inline cvec series_div(const cvec& p, const cvec& q, int n) {
    cvec r(n + 1, cplx(0));
    for (int k = 0; k <= n; ++k) {
        cplx s = k < int(p.size()) ? p[k] : cplx(0);
        for (int j = 1; j <= k && j < int(q.size()); ++j) s -= q[j] * r[k - j];
        r[k] = s / q[0];
    }
    return r;
}

inline cvec series_exp(const cvec& p, int n) {
    // e' = p' e
    cvec e(n + 1, cplx(0));
    e[0] = std::exp(p.empty() ? cplx(0) : p[0]);
    for (int k = 1; k <= n; ++k) {
        cplx s(0);
        for (int j = 1; j <= k && j < int(p.size()); ++j) s += double(j) * p[j] * e[k - j];
        e[k] = s / double(k);
    }
    return e;
}

// N[a] = a''/a'
inline TaylorDisk nonlinearity(const TaylorDisk& alpha) {
    if (alpha.order() < 2) throw error(errc::degenerate, "nonlinearity needs order >= 2");
    TaylorDisk d1 = derivative(alpha, 1);
    if (std::abs(d1.a[0]) < 1e-12)
        throw error(errc::singular_derivative, "alpha' vanishes at the centre", std::abs(d1.a[0]));
    TaylorDisk d2 = derivative(alpha, 2);
    return TaylorDisk(alpha.dom, series_div(d2.a, d1.a, d2.order()));
}

// N^{-1}[g](x) = int_0^x exp(int_0^z g)
inline TaylorDisk nonlinearity_inverse(const TaylorDisk& g) {
    const Disk d = g.dom;
    int n = g.order() + 1;
    cplx t0 = d.scaled(0.0);
    cvec P(n + 1, cplx(0));
    for (int k = 0; k <= g.order(); ++k) P[k + 1] = g.a[k] * d.r / double(k + 1);
    P[0] -= horner(P, t0);
    cvec E = series_exp(P, n);
    cvec A(n + 1, cplx(0));
    for (int k = 0; k < n; ++k) A[k + 1] = E[k] * d.r / double(k + 1);
    A[0] -= horner(A, t0);
    return TaylorDisk(d, A);
}

}  // namespace siegel
