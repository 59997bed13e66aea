#pragma once

#include <Eigen/Dense>
#include <array>

#include "newton.hpp"
#include "parallel.hpp"
#include "quasiarc.hpp"
#include "renorm.hpp"

namespace siegel {

// f(q, y) = sum c[j][k] t^j s^k, t = (q - c)/r, s = y/R
struct BiSeries {
    Disk dq;
    double R = 0.2;
    int nq = 0, ny = 0;
    cvec c;  // row-major (j, k)
    int ny_eff = 0;

    BiSeries() = default;
    BiSeries(Disk d, double R_, int nq_, int ny_) : dq(d), R(R_), nq(nq_), ny(ny_), c((nq_ + 1) * (ny_ + 1)) {}

    cplx& at(int j, int k) { return c[j * (ny + 1) + k]; }
    cplx at(int j, int k) const { return c[j * (ny + 1) + k]; }

    void trim(double tol = 0) {
        ny_eff = 0;
        for (int j = 0; j <= nq; ++j)
            for (int k = ny; k > ny_eff; --k)
                if (std::abs(at(j, k)) > tol) {
                    ny_eff = k;
                    break;
                }
    }

    // value and partials in the unscaled variables
    void eval(cplx q, cplx y, cplx& f, cplx& fq, cplx& fy) const {
        cplx t = dq.scaled(q), s = y / R;
        f = fq = fy = 0;
        for (int j = nq; j >= 0; --j) {
            cplx p = 0, dp = 0;
            for (int k = ny_eff; k >= 0; --k) {
                dp = dp * s + p;
                p = p * s + at(j, k);
            }
            fq = fq * t + f;
            f = f * t + p;
            fy = fy * t + dp;
        }
        fq /= dq.r;
        fy /= R;
    }
};

using V2 = std::array<cplx, 2>;

struct Jet2 {
    V2 f, fx, fy;
};

// F_i(x, y) = E_i(x^2, y) + x O_i(x^2, y)
struct BiDiskMap {
    Disk dom;
    double R = 0.2;
    std::array<BiSeries, 2> E, O;

    Jet2 jet(cplx x, cplx y) const {
        Jet2 r;
        cplx q = x * x;
        for (int i = 0; i < 2; ++i) {
            cplx e, eq, ey, o, oq, oy;
            E[i].eval(q, y, e, eq, ey);
            O[i].eval(q, y, o, oq, oy);
            r.f[i] = e + x * o;
            r.fx[i] = 2.0 * x * eq + o + 2.0 * q * oq;
            r.fy[i] = ey + x * oy;
        }
        return r;
    }
    V2 operator()(cplx x, cplx y) const { return jet(x, y).f; }
    V2 operator()(const V2& p) const { return jet(p[0], p[1]).f; }
};

struct Pair2D {
    BiDiskMap A, B;
};

struct Grid2D {
    int Mq = 256, My = 16;
    int nA = 40, nB = 50, ny = 8;
    double R = 0.2;
};

// samples on |t| = 1 in q and |y| = R, split into even and odd parts in x, then a 2D DFT
template <class Fn>
BiDiskMap fit_map(Disk dom, int nq, const Grid2D& g, Fn&& F, int workers = 1) {
    int Mq = g.Mq, My = g.My;
    std::vector<cvec> ev(2, cvec(Mq * My)), od(2, cvec(Mq * My));
    parallel_for(Mq, workers, [&](int j) {
        cplx q = dom.unscaled(std::polar(1.0, 2 * pi * j / Mq));
        cplx x = std::sqrt(q);
        for (int k = 0; k < My; ++k) {
            cplx y = std::polar(g.R, 2 * pi * k / My);
            V2 fp = F(x, y), fm = F(-x, y);
            for (int i = 0; i < 2; ++i) {
                ev[i][j * My + k] = 0.5 * (fp[i] + fm[i]);
                od[i][j * My + k] = (fp[i] - fm[i]) / (2.0 * x);
            }
        }
    });
    BiDiskMap m;
    m.dom = dom;
    m.R = g.R;
    cvec wq(Mq), wy(My);
    for (int j = 0; j < Mq; ++j) wq[j] = std::polar(1.0, -2 * pi * j / Mq);
    for (int k = 0; k < My; ++k) wy[k] = std::polar(1.0, -2 * pi * k / My);
    auto dft = [&](const cvec& v) {
        BiSeries s(dom, g.R, nq, g.ny);
        std::vector<cvec> tmp(Mq, cvec(g.ny + 1));
        for (int j = 0; j < Mq; ++j)
            for (int kk = 0; kk <= g.ny; ++kk) {
                cplx acc = 0;
                for (int k = 0; k < My; ++k) acc += v[j * My + k] * wy[(kk * k) % My];
                tmp[j][kk] = acc / double(My);
            }
        for (int jj = 0; jj <= nq; ++jj)
            for (int kk = 0; kk <= g.ny; ++kk) {
                cplx acc = 0;
                for (int j = 0; j < Mq; ++j) acc += tmp[j][kk] * wq[(long(jj) * j) % Mq];
                s.at(jj, kk) = acc / double(Mq);
            }
        s.trim(1e-15);
        return s;
    };
    for (int i = 0; i < 2; ++i) {
        m.E[i] = dft(ev[i]);
        m.O[i] = dft(od[i]);
    }
    return m;
}

inline BiDiskMap embed_map(const TaylorDisk& f, const Grid2D& g) {
    BiDiskMap m;
    m.dom = f.dom;
    m.R = g.R;
    for (int i = 0; i < 2; ++i) {
        m.E[i] = BiSeries(f.dom, g.R, f.order(), g.ny);
        m.O[i] = BiSeries(f.dom, g.R, f.order(), g.ny);
        for (int j = 0; j <= f.order(); ++j) m.E[i].at(j, 0) = f.a[j];
        m.E[i].trim();
        m.O[i].trim();
    }
    return m;
}

// (x, y) -> (eta(x), eta(x)), (xi(x), xi(x))
inline Pair2D embed(const FactorPair& p, const Grid2D& g = {}) { return {embed_map(p.phi, g), embed_map(p.psi, g)}; }

// (a(x, 0), b(x, 0)) read off the even y^0 coefficients; odd parts are reported separately
inline FactorPair reduce(const Pair2D& S, double* odd_l1 = nullptr) {
    FactorPair p{TaylorDisk(S.A.dom, S.A.E[0].nq), TaylorDisk(S.B.dom, S.B.E[0].nq)};
    double odd = 0;
    for (int j = 0; j <= S.A.E[0].nq; ++j) {
        p.phi.a[j] = S.A.E[0].at(j, 0);
        odd += std::abs(S.A.O[0].at(j, 0));
    }
    for (int j = 0; j <= S.B.E[0].nq; ++j) {
        p.psi.a[j] = S.B.E[0].at(j, 0);
        odd += std::abs(S.B.O[0].at(j, 0));
    }
    if (odd_l1) *odd_l1 = odd;
    return p;
}

// boundary points of Z x D_R for a map on q-disk `dom`
inline std::vector<V2> boundary_grid(const Disk& dom, double R, int nx = 512, int ny = 8) {
    std::vector<V2> pts;
    for (int j = 0; j < nx; ++j) {
        cplx x = std::sqrt(dom.unscaled(std::polar(1.0, 2 * pi * j / nx)));
        for (int k = 0; k < ny; ++k) {
            cplx y = std::polar(R, 2 * pi * k / ny);
            pts.push_back({x, y});
            pts.push_back({-x, y});
        }
    }
    return pts;
}

inline double sup_map(const BiDiskMap& m) {
    double s = 0;
    for (auto& p : boundary_grid(m.dom, m.R)) {
        V2 v = m(p);
        s = std::max({s, std::abs(v[0]), std::abs(v[1])});
    }
    return s;
}

// 1/2 (sup |A| + sup |B|)
inline double norm2d(const Pair2D& S) { return 0.5 * (sup_map(S.A) + sup_map(S.B)); }

// 1/2 (sup |h - h(., 0)| + sup |g - g(., 0)|)
inline double y_dependence(const Pair2D& S) {
    auto one = [](const BiDiskMap& m) {
        double s = 0;
        for (auto& p : boundary_grid(m.dom, m.R)) s = std::max(s, std::abs(m(p)[1] - m(p[0], 0.0)[1]));
        return s;
    };
    return 0.5 * (one(S.A) + one(S.B));
}

// distance to the embedded subspace: components differ, or depend on y
inline double distance_to_embedding(const Pair2D& S) {
    auto one = [](const BiDiskMap& m) {
        double s = 0;
        for (auto& p : boundary_grid(m.dom, m.R)) {
            V2 v = m(p);
            V2 v0 = m(p[0], 0.0);
            s = std::max({s, std::abs(v[0] - v[1]), std::abs(v[0] - v0[0])});
        }
        return s;
    };
    return 0.5 * (one(S.A) + one(S.B));
}

// first derivatives at x of an analytic scalar function via a Cauchy circle
template <class Fn>
std::array<cplx, 3> cauchy_derivs(Fn&& f, cplx x, double rho = 0.05, int M = 32) {
    std::array<cplx, 3> d{0, 0, 0};
    for (int j = 0; j < M; ++j) {
        cplx w = std::polar(1.0, 2 * pi * j / M);
        cplx v = f(x + rho * w);
        d[0] += v;
        d[1] += v / w;
        d[2] += v / (w * w);
    }
    d[0] /= double(M);
    d[1] /= double(M) * rho;
    d[2] *= 2.0 / (double(M) * rho * rho);
    return d;
}

// scalar Newton with a few continuation steps from the seed's value
template <class Fn>
cplx newton1(Fn&& jet, cplx target, cplx x, int steps = 1, int iters = 60) {
    cplx f0 = jet(x).first;
    for (int s = 1; s <= steps; ++s) {
        cplx tgt = f0 + (target - f0) * (double(s) / steps);
        for (int it = 0; it < iters; ++it) {
            auto [v, d] = jet(x);
            if (d == cplx(0)) throw error(errc::coordinate_change, "zero derivative in inversion");
            cplx dx = (v - tgt) / d;
            x -= dx;
            if (std::abs(dx) < 1e-15 * std::max(1.0, std::abs(x))) break;
        }
    }
    cplx res = jet(x).first - target;
    if (!(std::abs(res) < 1e-11)) throw error(errc::coordinate_change, "inversion did not converge", std::abs(res));
    return x;
}

// H(x, y) = (a(x, y), a(b(u, z), y)) with g(z, 0) = y, g(u, z) = y
class CoordinateChange {
    Pair2D S_;
    cplx x_root_, z_ref_;

    auto a0_jet() const {
        return [this](cplx s) {
            Jet2 j = S_.A.jet(s, 0.0);
            return std::pair{j.f[0], j.fx[0]};
        };
    }
    auto g0_jet() const {
        return [this](cplx s) {
            Jet2 j = S_.B.jet(s, 0.0);
            return std::pair{j.f[1], j.fx[1]};
        };
    }

public:
    explicit CoordinateChange(const Pair2D& S) : S_(S) {
        // zero of a(., 0) near the critical value preimage, then a reference root of g(., 0)
        const BiDiskMap& A = S.A;
        cplx q = A.dom.c;
        for (int it = 0; it < 60; ++it) {
            cplx e, eq, ey;
            A.E[0].eval(q, 0.0, e, eq, ey);
            cplx dq = e / eq;
            q -= dq;
            if (std::abs(dq) < 1e-15) break;
        }
        x_root_ = newton1(a0_jet(), 0.0, std::sqrt(q));
        const BiDiskMap& B = S.B;
        cplx qb = 0;
        for (int it = 0; it < 60; ++it) {
            cplx e, eq, ey;
            B.E[0].eval(qb, 0.0, e, eq, ey);
            cplx dq = (e - x_root_) / eq;
            qb -= dq;
            if (std::abs(dq) < 1e-15) break;
        }
        z_ref_ = newton1(g0_jet(), x_root_, std::sqrt(qb));
    }

    cplx H2(cplx y, cplx seed) const {
        const BiDiskMap &A = S_.A, &B = S_.B;
        cplx z = newton1(g0_jet(), y, seed);
        cplx u = newton1(
            [&](cplx w) {
                Jet2 j = B.jet(w, z);
                return std::pair{j.f[1], j.fx[1]};
            },
            y, seed);
        return A(B(u, z)[0], y)[0];
    }

    V2 apply(const V2& p, cplx seed) const { return {S_.A(p)[0], H2(p[1], seed)}; }

    V2 inverse(const V2& P, cplx* z_out = nullptr) const {
        const BiDiskMap &A = S_.A, &B = S_.B;
        cplx X = P[0], Y = P[1];
        cplx y = newton1(a0_jet(), Y, x_root_, 4);
        cplx z = newton1(g0_jet(), y, z_ref_, 4);
        cplx u = z;
        Eigen::Vector3cd v(y, z, u);
        for (int it = 0; it < 60; ++it) {
            Jet2 gz = B.jet(v[1], 0.0), gu = B.jet(v[2], v[1]), bu = gu;
            cplx w = bu.f[0];
            Jet2 aw = A.jet(w, v[0]);
            Eigen::Vector3cd F(gz.f[1] - v[0], gu.f[1] - v[0], aw.f[0] - Y);
            Eigen::Matrix3cd J;
            J << -1.0, gz.fx[1], 0.0, -1.0, gu.fy[1], gu.fx[1], aw.fy[0], aw.fx[0] * bu.fy[0], aw.fx[0] * bu.fx[0];
            Eigen::Vector3cd d = J.partialPivLu().solve(F);
            v -= d;
            if (d.cwiseAbs().maxCoeff() < 1e-15) break;
        }
        y = v[0];
        if (z_out) *z_out = v[1];
        cplx x = newton1(
            [&](cplx s) {
                Jet2 j = A.jet(s, y);
                return std::pair{j.f[0], j.fx[0]};
            },
            X, newton1(a0_jet(), X, x_root_, 4));
        return {x, y};
    }

};

// Abar = H o B o Sigma^l o A o H^{-1}, Bbar = H o B o Sigma^m o A o H^{-1}
class PreRenorm2D {
public:
    PreRenorm2D(const Pair2D& S, int n) : S_(S), H_(S_) {
        if (n < 2 || n % 2) throw error(errc::config, "2D renormalization level must be even and >= 2");
        auto [s, t] = renorm_words(n);
        l_ = letters(s);
        m_ = letters(t);
        l_.resize(l_.size() - 2);
        m_.resize(m_.size() - 2);
        // only pi1 is needed; H2 would have to invert g at its critical value here
        ell_ = run(m_, {0.0, 0.0}, true)[0];
        if (std::abs(ell_) < 1e-8) throw error(errc::degenerate_scaling, "2D scaling vanishes", std::abs(ell_));
    }

    V2 A_bar(const V2& P) const { return run(l_, P); }
    V2 B_bar(const V2& P) const { return run(m_, P); }
    cplx ell() const { return ell_; }
    const CoordinateChange& H() const { return H_; }

private:
    V2 run(const std::vector<int>& word, const V2& P, bool first_only = false) const {
        V2 p = S_.A(H_.inverse(P));
        for (int l : word) p = l == 0 ? S_.A(p) : S_.B(p);
        V2 b = S_.B(p);
        if (first_only) return {S_.A(b)[0], 0.0};
        return H_.apply(b, p[0]);
    }

    Pair2D S_;
    CoordinateChange H_;
    std::vector<int> l_, m_;
    cplx ell_;
};

inline Pair2D prerenorm_fit(const PreRenorm2D& pre, const Grid2D& g, int workers = 1) {
    cplx l = pre.ell();
    Pair2D out;
    out.A = fit_map(U_default, g.nA, g, [&](cplx x, cplx y) {
        V2 v = pre.A_bar({l * x, l * y});
        return V2{v[0] / l, v[1] / l};
    }, workers);
    out.B = fit_map(V_default, g.nB, g, [&](cplx x, cplx y) {
        V2 v = pre.B_bar({l * x, l * y});
        return V2{v[0] / l, v[1] / l};
    }, workers);
    return out;
}

struct CriticalShift {
    cplx c1 = 0, c2 = 0;
};

template <class Fn>
cplx critical_point(Fn&& f, cplx x0 = 0) {
    cplx x = x0;
    for (int it = 0; it < 50; ++it) {
        auto d = cauchy_derivs(f, x);
        if (d[2] == cplx(0)) throw error(errc::projection, "degenerate critical point");
        cplx dx = d[1] / d[2];
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
        if (std::abs(x) > 0.2 * 0.636) throw error(errc::projection, "critical point left the search window");
    }
    return x;
}

// T1^{-1} o F o T1 etc. with T(x, y) = (x + c, y), refit only when the shift is nonzero
inline Pair2D project_critical(const Pair2D& S, const Grid2D& g, CriticalShift* shifts = nullptr, int workers = 1) {
    auto fBA = [&](const Pair2D& P) {
        return [&P](cplx x) { return P.B(P.A(x, 0.0))[0]; };
    };
    auto fAB = [&](const Pair2D& P) {
        return [&P](cplx x) { return P.A(P.B(x, 0.0))[0]; };
    };
    CriticalShift cs;
    cs.c1 = critical_point(fBA(S));
    Pair2D S1 = S;
    if (std::abs(cs.c1) > 1e-14) {
        cplx c = cs.c1;
        auto conj = [&](const BiDiskMap& F) {
            return [&F, c](cplx x, cplx y) {
                V2 v = F(x + c, y);
                return V2{v[0] - c, v[1]};
            };
        };
        S1.A = fit_map(S.A.dom, S.A.E[0].nq, g, conj(S.A), workers);
        S1.B = fit_map(S.B.dom, S.B.E[0].nq, g, conj(S.B), workers);
    }
    cs.c2 = critical_point(fAB(S1));
    Pair2D S2 = S1;
    if (std::abs(cs.c2) > 1e-14) {
        cplx c = cs.c2;
        S2.A = fit_map(S1.A.dom, S1.A.E[0].nq, g, [&](cplx x, cplx y) {
            V2 v = S1.A(x, y);
            return V2{v[0] - c, v[1]};
        }, workers);
        S2.B = fit_map(S1.B.dom, S1.B.E[0].nq, g, [&](cplx x, cplx y) { return S1.B(x + c, y); }, workers);
    }
    if (shifts) *shifts = cs;
    return S2;
}

struct Projection2D {
    cplx a = 0, b = 0, c = 0;
    double residual = 0;
    int iterations = 0;
};

// A + (a x^4 + b x^6) in both components, B + c in both components
inline Pair2D apply_correction_2d(const Pair2D& S, cplx a, cplx b, cplx c) {
    Pair2D T = S;
    int n = S.A.E[0].nq;
    cvec z2 = zpow(S.A.dom, 2, n), z3 = zpow(S.A.dom, 3, n);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j <= n; ++j) T.A.E[i].at(j, 0) += a * z2[j] + b * z3[j];
        T.B.E[i].at(0, 0) += c;
    }
    return T;
}

// commutator value and second derivative at 0 on the x-axis, and pi1 B(0, 0) - 1
inline std::array<cplx, 3> commutation_system(const Pair2D& S) {
    auto f = [&](cplx x) { return S.A(S.B(x, 0.0))[0] - S.B(S.A(x, 0.0))[0]; };
    auto d = cauchy_derivs(f, 0.0, 0.1, 32);
    return {f(0.0), d[2], S.B(0.0, 0.0)[0] - 1.0};
}

inline Pair2D project_ac_2d(const Pair2D& S, Projection2D* info = nullptr, double tol = 1e-13) {
    Eigen::Vector3cd p = Eigen::Vector3cd::Zero();
    auto F = [&](const Eigen::Vector3cd& v) {
        auto r = commutation_system(apply_correction_2d(S, v[0], v[1], v[2]));
        return Eigen::Vector3cd(r[0], r[1], r[2]);
    };
    Projection2D pr;
    Eigen::Vector3cd Fp = F(p);
    for (int it = 0; it < 30 && Fp.cwiseAbs().maxCoeff() > tol; ++it) {
        Eigen::Matrix3cd J;
        double h = 1e-6;
        for (int k = 0; k < 3; ++k) {
            Eigen::Vector3cd e = Eigen::Vector3cd::Zero();
            e[k] = h;
            J.col(k) = (F(p + e) - F(p - e)) / (2 * h);
        }
        auto lu = J.fullPivLu();
        if (!lu.isInvertible()) throw error(errc::projection, "2D projection Jacobian is singular");
        p -= lu.solve(Fp);
        Fp = F(p);
        pr.iterations = it + 1;
    }
    pr.a = p[0];
    pr.b = p[1];
    pr.c = p[2];
    pr.residual = Fp.cwiseAbs().maxCoeff();
    if (!(pr.residual < 1e-10)) throw error(errc::projection, "2D projection did not converge", pr.residual);
    if (info) *info = pr;
    return apply_correction_2d(S, pr.a, pr.b, pr.c);
}

struct RG2DInfo {
    cplx ell;
    CriticalShift shifts;
    Projection2D projection;
};

// L^{-1} o Pi2 o Pi1 o pR^n o L with both projections taken in the rescaled coordinates
inline Pair2D rg_2d(const Pair2D& S, int n, const Grid2D& g, RG2DInfo* info = nullptr, int workers = 1) {
    PreRenorm2D pre(S, n);
    Pair2D hat = prerenorm_fit(pre, g, workers);
    RG2DInfo inf;
    inf.ell = pre.ell();
    Pair2D t = project_critical(hat, g, &inf.shifts, workers);
    Pair2D out = project_ac_2d(t, &inf.projection);
    if (info) *info = inf;
    return out;
}

inline Grid2D grid_for(const FactorPair& p) {
    Grid2D g;
    g.nA = p.n1();
    g.nB = p.n2();
    return g;
}

// coefficient l1 distance between maps of equal shape
inline double l1_distance(const Pair2D& P, const Pair2D& Q) {
    double s = 0;
    auto one = [&](const BiSeries& a, const BiSeries& b) {
        for (size_t i = 0; i < a.c.size(); ++i) s += std::abs(a.c[i] - b.c[i]);
    };
    for (int i = 0; i < 2; ++i) {
        one(P.A.E[i], Q.A.E[i]);
        one(P.A.O[i], Q.A.O[i]);
        one(P.B.E[i], Q.B.E[i]);
        one(P.B.O[i], Q.B.O[i]);
    }
    return s;
}

inline Pair2D axpy(const Pair2D& P, cplx h, const Pair2D& D) {
    Pair2D R = P;
    auto one = [&](BiSeries& a, const BiSeries& d) {
        for (size_t i = 0; i < a.c.size(); ++i) a.c[i] += h * d.c[i];
        a.trim(1e-15);
    };
    for (int i = 0; i < 2; ++i) {
        one(R.A.E[i], D.A.E[i]);
        one(R.A.O[i], D.A.O[i]);
        one(R.B.E[i], D.B.E[i]);
        one(R.B.O[i], D.B.O[i]);
    }
    return R;
}

inline Pair2D scaled_difference(const Pair2D& P, const Pair2D& Q, double s) {
    Pair2D R = P;
    auto one = [&](BiSeries& a, const BiSeries& b) {
        for (size_t i = 0; i < a.c.size(); ++i) a.c[i] = (a.c[i] - b.c[i]) * s;
        a.ny_eff = a.ny;
    };
    for (int i = 0; i < 2; ++i) {
        one(R.A.E[i], Q.A.E[i]);
        one(R.A.O[i], Q.A.O[i]);
        one(R.B.E[i], Q.B.E[i]);
        one(R.B.O[i], Q.B.O[i]);
    }
    return R;
}

inline double l1(const Pair2D& P) {
    Pair2D Z = P;
    for (int i = 0; i < 2; ++i)
        for (auto* s : {&Z.A.E[i], &Z.A.O[i], &Z.B.E[i], &Z.B.O[i]}) std::fill(s->c.begin(), s->c.end(), cplx(0));
    return l1_distance(P, Z);
}

// pure y direction: y added to the second component of both maps
inline Pair2D y_direction(const Pair2D& S) {
    Pair2D D = S;
    for (int i = 0; i < 2; ++i)
        for (auto* s : {&D.A.E[i], &D.A.O[i], &D.B.E[i], &D.B.O[i]}) std::fill(s->c.begin(), s->c.end(), cplx(0));
    D.A.E[1].at(0, 1) = D.A.R;
    D.B.E[1].at(0, 1) = D.B.R;
    for (auto* s : {&D.A.E[1], &D.B.E[1]}) s->ny_eff = 1;
    return D;
}

struct SpectralCoincidence {
    double unstable_growth = 0;  // along the embedded unstable eigenvector
    double unstable_residual = 0;
    double y_ratio = 0;          // derivative norm over input norm along y
};

// central differences of rg_2d at iota(p)
inline SpectralCoincidence spectral_coincidence(const FactorPair& p, const FactorPair& v, int n, double h = 1e-6,
                                                int workers = 1) {
    Grid2D g = grid_for(p);
    Pair2D base = embed(p, g);
    SpectralCoincidence out;
    Pair2D dv = embed(v, g);
    Pair2D plus = rg_2d(axpy(base, h, dv), n, g, nullptr, workers);
    Pair2D minus = rg_2d(axpy(base, -h, dv), n, g, nullptr, workers);
    Pair2D D = scaled_difference(plus, minus, 1 / (2 * h));
    Vec w = pack(reduce(D)), x = pack(v);
    out.unstable_growth = w.dot(x) / x.dot(x);
    out.unstable_residual = l1(D) == 0 ? 0 : (w - out.unstable_growth * x).lpNorm<1>() / w.lpNorm<1>();

    Pair2D dy = y_direction(base);
    Pair2D yp = rg_2d(axpy(base, h, dy), n, g, nullptr, workers);
    Pair2D ym = rg_2d(axpy(base, -h, dy), n, g, nullptr, workers);
    Pair2D Dy = scaled_difference(yp, ym, 1 / (2 * h));
    out.y_ratio = norm2d(Dy) / norm2d(dy);
    return out;
}

}  // namespace siegel
