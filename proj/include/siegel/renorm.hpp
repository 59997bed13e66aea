#pragma once

#include <algorithm>
#include <tuple>

#include "pairs.hpp"

namespace siegel {

struct InclusionMargin {
    bool ok = false;
    double margin = 0;  // radius minus worst distance to the target centre
};

struct RenormalizabilityReport {
    InclusionMargin inc1, inc2, inc3;
    bool ok() const { return inc1.ok && inc2.ok && inc3.ok; }
};

inline cplx scaling_factor(const FactorPair& p) { return evaluate(p.phi, 0.0); }

// inclusions checked in the squared coordinate: x in Z iff x^2 in U
inline RenormalizabilityReport check_renormalizable(const FactorPair& p, int samples = 256) {
    const Disk& U = p.phi.dom;
    const Disk& V = p.psi.dom;
    cplx l2 = std::pow(scaling_factor(p), 2);
    double d1 = 0, d2 = 0, d3 = 0;
    for (int j = 0; j < samples; ++j) {
        cplx e = std::polar(1.0, 2 * pi * j / samples);
        cplx v = V.unscaled(e), u = U.unscaled(e);
        // lambda c(W) in Z
        d1 = std::max(d1, std::abs(l2 * std::conj(v) - U.c));
        // lambda c(Z) in W
        cplx w = l2 * std::conj(u);
        d2 = std::max(d2, std::abs(w - V.c));
        // xi(lambda c(Z)) in Z
        cplx x = evaluate(p.psi, w);
        d3 = std::max(d3, std::abs(x * x - U.c));
    }
    RenormalizabilityReport r;
    r.inc1 = {U.r - d1 > 0, U.r - d1};
    r.inc2 = {V.r - d2 > 0, V.r - d2};
    r.inc3 = {U.r - d3 > 0, U.r - d3};
    return r;
}

// phi~(z) = conj(phi(psi(l^2 conj z)^2)/l), psi~(z) = conj(phi(l^2 conj z)/l), l = phi(0)
inline FactorPair renormalize(const FactorPair& p) {
    const Disk& U = p.phi.dom;
    const Disk& V = p.psi.dom;
    int n1 = p.n1(), n2 = p.n2();
    cplx lam = scaling_factor(p);
    if (std::abs(lam) < 1e-8)
        throw error(errc::degenerate_scaling, "scaling factor vanishes", std::abs(lam));
    cplx l2 = lam * lam;

    // s -> l^2 (conj cU + rU s) in V's scaled variable
    TaylorDisk lin1(Disk(std::conj(U.c), U.r), cvec{l2 * std::conj(U.c), l2 * U.r});
    TaylorDisk s1 = compose_to(p.psi, lin1, n1);
    TaylorDisk sq(s1.dom, mul(s1.a, s1.a, n1));
    TaylorDisk G = compose_to(p.phi, sq, n1);

    TaylorDisk lin2(Disk(std::conj(V.c), V.r), cvec{l2 * std::conj(V.c), l2 * V.r});
    TaylorDisk G2 = compose_to(p.phi, lin2, n2);

    FactorPair out{TaylorDisk(U, n1), TaylorDisk(V, n2)};
    for (int k = 0; k <= n1; ++k) out.phi.a[k] = std::conj(G.a[k] / lam);
    for (int k = 0; k <= n2; ++k) out.psi.a[k] = std::conj(G2.a[k] / lam);
    return out;
}

struct RGResult {
    FactorPair pair;
    ProjectionCoeffs coeffs;
    cplx lambda;
};

inline RGResult rg(const FactorPair& p) {
    cplx lam = scaling_factor(p);
    auto [q, c] = project(renormalize(p));
    return {std::move(q), c, lam};
}

inline double golden_theta() { return (std::sqrt(5.0) - 1) / 2; }

// l(P(l^{-1}(t))) for P(z) = e z - 0.5 e z^2, l(z) = (z - c)/r, as a series in t on the unit disk
inline TaylorDisk p_theta(const Disk& d) {
    cplx e = std::polar(1.0, 2 * pi * golden_theta());
    // z = c + r t
    cplx c = d.c;
    double r = d.r;
    cvec a(3);
    a[0] = (e * c - 0.5 * e * c * c - c) / r;
    a[1] = e - e * c;
    a[2] = -0.5 * e * r;
    return TaylorDisk(Disk(0.0, 1.0), a);
}

// first n+1 Fourier coefficients of samples on the unit circle
inline cvec dft_truncate(const cvec& vals, int n) {
    int M = int(vals.size());
    cvec out(n + 1, cplx(0));
    for (int k = 0; k <= n; ++k) {
        cplx s(0);
        for (int j = 0; j < M; ++j) s += vals[j] * std::polar(1.0, -2 * pi * double(k) * j / M);
        out[k] = s / double(M);
    }
    return out;
}

// pair of return maps of P_theta at Fibonacci times, conjugated to put the critical point at 0
// and normalised by the critical value orbit point; equals `level` renormalizations of (P, id)
inline FactorPair seed_pair(int n1, int n2, int level = 12, int samples = 256, Disk U = U_default,
                            Disk V = V_default) {
    if (level < 1) throw error(errc::config, "seed level must be >= 1");
    cplx e = std::polar(1.0, 2 * pi * golden_theta());
    auto f = [&](cplx w) { return 0.5 * e * (1.0 - w * w) - 1.0; };
    std::vector<long> fib{1, 1};
    while (int(fib.size()) < level + 2) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
    auto iter = [&](cplx w, long q) {
        for (long i = 0; i < q; ++i) w = f(w);
        return w;
    };
    long qa = fib[level + 1], qb = fib[level];
    cplx s = iter(0.0, qb);
    auto sample = [&](const Disk& d, long q) {
        cvec v(samples);
        for (int j = 0; j < samples; ++j) {
            cplx x = d.unscaled(std::polar(1.0, 2 * pi * j / samples));
            v[j] = iter(s * std::sqrt(x), q) / s;
        }
        return v;
    };
    return {TaylorDisk(U, dft_truncate(sample(U, qa), n1)), TaylorDisk(V, dft_truncate(sample(V, qb), n2))};
}

}  // namespace siegel
