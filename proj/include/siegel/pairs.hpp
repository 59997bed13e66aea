#pragma once

#include <array>
#include <cmath>

#include "series.hpp"

namespace siegel {

// default factor disks
inline const Disk U_default{cplx(0.5672961438978619, -0.1229664702397770), 0.636};
inline const Disk V_default{cplx(-0.2188497414079558, -0.2328147240271490), 0.3640985354093064};

struct FactorPair {
    TaylorDisk phi;  // on U
    TaylorDisk psi;  // on V

    int n1() const { return phi.order(); }
    int n2() const { return psi.order(); }

    // symmetric pair eta = phi o q2, xi = psi o q2
    cplx eta(cplx x) const { return evaluate(phi, x * x); }
    cplx xi(cplx x) const { return evaluate(psi, x * x); }
    cplx deta(cplx x) const { return 2.0 * x * evaluate_d1(phi, x * x); }
    cplx dxi(cplx x) const { return 2.0 * x * evaluate_d1(psi, x * x); }
};

inline FactorPair zero_pair(int n1, int n2, Disk U = U_default, Disk V = V_default) {
    return {TaylorDisk(U, n1), TaylorDisk(V, n2)};
}

inline FactorPair operator+(const FactorPair& p, const FactorPair& q) {
    FactorPair r = p;
    for (size_t k = 0; k < r.phi.a.size(); ++k) r.phi.a[k] += q.phi.a[k];
    for (size_t k = 0; k < r.psi.a.size(); ++k) r.psi.a[k] += q.psi.a[k];
    return r;
}
inline FactorPair operator-(const FactorPair& p, const FactorPair& q) {
    FactorPair r = p;
    for (size_t k = 0; k < r.phi.a.size(); ++k) r.phi.a[k] -= q.phi.a[k];
    for (size_t k = 0; k < r.psi.a.size(); ++k) r.psi.a[k] -= q.psi.a[k];
    return r;
}
inline FactorPair operator*(cplx s, const FactorPair& p) {
    FactorPair r = p;
    for (auto& x : r.phi.a) x *= s;
    for (auto& x : r.psi.a) x *= s;
    return r;
}

inline double l1(const FactorPair& p) { return l1(p.phi) + l1(p.psi); }

struct PairNorms {
    double l1 = 0;
    double sup = 0;
};

inline PairNorms norms(const FactorPair& p, int grid = 512) {
    return {l1(p), std::max(sup_estimate(p.phi, grid), sup_estimate(p.psi, grid))};
}

struct CommutationResiduals {
    cplx r0, r1, r2, rnorm;
    double max_abs() const {
        return std::max({std::abs(r0), std::abs(r2), std::abs(rnorm)});
    }
    bool almost_commuting(double tol = 1e-12) const { return max_abs() < tol; }
};

inline CommutationResiduals residuals(const FactorPair& p) {
    CommutationResiduals r;
    cplx p0 = evaluate(p.psi, 0.0), f0 = evaluate(p.phi, 0.0);
    cplx dp0 = evaluate_d1(p.psi, 0.0), df0 = evaluate_d1(p.phi, 0.0);
    r.r0 = evaluate(p.phi, p0 * p0) - evaluate(p.psi, f0 * f0);
    r.r1 = p.deta(p.xi(0.0)) * p.dxi(0.0) - p.dxi(p.eta(0.0)) * p.deta(0.0);
    r.r2 = evaluate_d1(p.phi, p0 * p0) * p0 * dp0 - evaluate_d1(p.psi, f0 * f0) * f0 * df0;
    r.rnorm = p0 - 1.0;
    return r;
}

// Taylor coefficients of eta(h(x)) at 0 where h = c0 + hs (hs has zero constant term), eta = f o q2
inline cvec outer_eta(const TaylorDisk& f, cplx c0, const cvec& hs, int k) {
    // eta(c0+h) = f(c0^2 + u), u = 2 c0 h + h^2
    cvec u = mul(hs, hs, k);
    for (int i = 0; i <= k; ++i) u[i] += 2.0 * c0 * hs[i];
    cvec ft = taylor_at(f, c0 * c0, k);
    return horner_series(ft, u, k);
}

// Taylor coefficients of f(x^2) at 0 through order k
inline cvec even_series(const TaylorDisk& f, int k) {
    cvec t = taylor_at(f, 0.0, k / 2);
    cvec out(k + 1, cplx(0));
    for (int j = 0; 2 * j <= k; ++j) out[2 * j] = t[j];
    return out;
}

// coefficients 0..k of eta o xi - xi o eta at 0
inline cvec higher_commutator_coeffs(const FactorPair& p, int k) {
    cvec e = even_series(p.phi, k), x = even_series(p.psi, k);
    cvec xs = x, es = e;
    xs[0] = 0;
    es[0] = 0;
    cvec ex = outer_eta(p.phi, x[0], xs, k);
    cvec xe = outer_eta(p.psi, e[0], es, k);
    for (int i = 0; i <= k; ++i) ex[i] -= xe[i];
    return ex;
}

struct ProjectionCoeffs {
    cplx a, b, c;
    cplx det;         // from the matrix entries
    cplx det_closed;  // psi_hat(0)^9 psi'(0)
};

struct ProjectionSystem {
    std::array<cplx, 4> M;  // row-major 2x2
    std::array<cplx, 2> rhs;
    cplx p0, dp0, f0, df0, c;
};

inline ProjectionSystem projection_system(const FactorPair& p) {
    ProjectionSystem s;
    s.c = 1.0 - evaluate(p.psi, 0.0);
    TaylorDisk psih = p.psi;
    psih.a[0] += s.c;
    s.p0 = evaluate(psih, 0.0);
    s.dp0 = evaluate_d1(psih, 0.0);
    s.f0 = evaluate(p.phi, 0.0);
    s.df0 = evaluate_d1(p.phi, 0.0);
    cplx p0 = s.p0, dp0 = s.dp0, f0 = s.f0, df0 = s.df0;
    s.M = {std::pow(p0, 4), std::pow(p0, 6), 2.0 * std::pow(p0, 3) * dp0, 3.0 * std::pow(p0, 5) * dp0};
    s.rhs = {evaluate(psih, f0 * f0) - evaluate(p.phi, p0 * p0),
             evaluate_d1(psih, f0 * f0) * f0 * df0 - evaluate_d1(p.phi, p0 * p0) * p0 * dp0};
    return s;
}

inline std::array<cplx, 2> solve2(const std::array<cplx, 4>& M, const std::array<cplx, 2>& r) {
    cplx d = M[0] * M[3] - M[1] * M[2];
    return {(r[0] * M[3] - M[1] * r[1]) / d, (M[0] * r[1] - M[2] * r[0]) / d};
}

// (phi + a z^2 + b z^3, psi + c)
inline FactorPair apply_correction(const FactorPair& p, cplx a, cplx b, cplx c) {
    FactorPair q = p;
    int n = p.n1();
    cvec z2 = zpow(p.phi.dom, 2, n), z3 = zpow(p.phi.dom, 3, n);
    for (int k = 0; k <= n; ++k) q.phi.a[k] += a * z2[k] + b * z3[k];
    q.psi.a[0] += c;
    return q;
}

inline std::pair<FactorPair, ProjectionCoeffs> project(const FactorPair& p) {
    ProjectionSystem s = projection_system(p);
    ProjectionCoeffs pc;
    pc.det = s.M[0] * s.M[3] - s.M[1] * s.M[2];
    pc.det_closed = std::pow(s.p0, 9) * s.dp0;
    if (std::abs(pc.det) < 1e-8)
        throw error(errc::projection_singular, "projection system is singular", std::abs(pc.det));
    auto ab = solve2(s.M, s.rhs);
    pc.a = ab[0];
    pc.b = ab[1];
    pc.c = s.c;
    return {apply_correction(p, pc.a, pc.b, pc.c), pc};
}

}  // namespace siegel
