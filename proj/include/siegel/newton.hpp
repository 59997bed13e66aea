#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <random>

#include "parallel.hpp"
#include "renorm.hpp"

namespace siegel {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---- real basis: [Re phi_k, Re psi_k, Im phi_k, Im psi_k] ----

inline int tangent_dim(int n1, int n2) { return 2 * (n1 + 1) + 2 * (n2 + 1); }

inline Vec pack(const FactorPair& p) {
    int n1 = p.n1(), n2 = p.n2(), h = n1 + n2 + 2;
    Vec x(2 * h);
    for (int k = 0; k <= n1; ++k) {
        x[k] = p.phi.a[k].real();
        x[h + k] = p.phi.a[k].imag();
    }
    for (int k = 0; k <= n2; ++k) {
        x[n1 + 1 + k] = p.psi.a[k].real();
        x[h + n1 + 1 + k] = p.psi.a[k].imag();
    }
    return x;
}

inline FactorPair unpack(const Vec& x, int n1, int n2, Disk U = U_default, Disk V = V_default) {
    int h = n1 + n2 + 2;
    if (x.size() != 2 * h) throw error(errc::config, "tangent vector length mismatch");
    FactorPair p{TaylorDisk(U, n1), TaylorDisk(V, n2)};
    for (int k = 0; k <= n1; ++k) p.phi.a[k] = cplx(x[k], x[h + k]);
    for (int k = 0; k <= n2; ++k) p.psi.a[k] = cplx(x[n1 + 1 + k], x[h + n1 + 1 + k]);
    return p;
}

inline FactorPair basis_vector(int j, int n1, int n2, Disk U = U_default, Disk V = V_default) {
    Vec e = Vec::Zero(tangent_dim(n1, n2));
    e[j] = 1.0;
    return unpack(e, n1, n2, U, V);
}

// complex structure: J(u_k) = i u_k etc.
inline Mat complex_structure(int n1, int n2) {
    int h = n1 + n2 + 2;
    Mat J = Mat::Zero(2 * h, 2 * h);
    for (int k = 0; k < h; ++k) {
        J(h + k, k) = 1.0;
        J(k, h + k) = -1.0;
    }
    return J;
}

// sum_k a_k P[k], truncated to the length of P[0]
inline cvec combine(const cvec& a, const std::vector<cvec>& P) {
    int n = int(P[0].size()) - 1;
    cvec r(n + 1, cplx(0));
    int K = std::min<int>(int(a.size()), int(P.size()));
    for (int k = 0; k < K; ++k) {
        if (a[k] == cplx(0)) continue;
        for (int i = 0; i <= n; ++i) r[i] += a[k] * P[k][i];
    }
    return r;
}

// everything D RG(p) needs that does not depend on the direction
class DifferentialContext {
public:
    explicit DifferentialContext(const FactorPair& p) : p_(p) {
        const Disk& U = p.phi.dom;
        const Disk& V = p.psi.dom;
        int n1 = p.n1(), n2 = p.n2();
        lam_ = scaling_factor(p);
        if (std::abs(lam_) < 1e-8)
            throw error(errc::degenerate_scaling, "scaling factor vanishes", std::abs(lam_));
        cplx l2 = lam_ * lam_;

        W_ = {l2 * std::conj(U.c), l2 * U.r};
        cvec Lpsi{(W_[0] - V.c) / V.r, W_[1] / V.r};
        Lpsi_pow_ = powers(Lpsi, n2, n1);
        Ps_ = combine(p.psi.a, Lpsi_pow_);
        cvec Q = mul(Ps_, Ps_, n1);
        Q[0] -= U.c;
        for (auto& x : Q) x /= U.r;
        Q_pow_ = powers(Q, n1, n1);
        G_ = combine(p.phi.a, Q_pow_);
        for (auto& x : G_) x /= lam_;
        Phid_ = combine(derivative(p.phi, 1).a, Q_pow_);
        Pd_ = combine(derivative(p.psi, 1).a, Lpsi_pow_);

        W2_ = {l2 * std::conj(V.c), l2 * V.r};
        cvec L2{(W2_[0] - U.c) / U.r, W2_[1] / U.r};
        L2_pow_ = powers(L2, n1, n2);
        G2_ = combine(p.phi.a, L2_pow_);
        for (auto& x : G2_) x /= lam_;
        Phid2_ = combine(derivative(p.phi, 1).a, L2_pow_);

        R_ = renormalize(p);
        sys_ = projection_system(R_);
        det_ = sys_.M[0] * sys_.M[3] - sys_.M[1] * sys_.M[2];
        if (std::abs(det_) < 1e-8)
            throw error(errc::differential_singular, "projection system is singular", std::abs(det_));
        ab_ = solve2(sys_.M, sys_.rhs);
        TaylorDisk psih = R_.psi;
        psih.a[0] += sys_.c;
        cplx f2 = sys_.f0 * sys_.f0, p2 = sys_.p0 * sys_.p0;
        psih_d1_f2_ = evaluate_d1(psih, f2);
        psih_d2_f2_ = evaluate_d2(psih, f2);
        phi_d1_p2_ = evaluate_d1(R_.phi, p2);
        z2_ = zpow(U, 2, n1);
        z3_ = zpow(U, 3, n1);
    }

    cplx lambda() const { return lam_; }
    const FactorPair& point() const { return p_; }

    // D R(p)(u, v), before projection
    FactorPair apply_renorm(const FactorPair& t) const {
        int n1 = p_.n1(), n2 = p_.n2();
        cplx dl = evaluate(t.phi, 0.0);
        FactorPair out{TaylorDisk(p_.phi.dom, n1), TaylorDisk(p_.psi.dom, n2)};

        cvec uQ = combine(t.phi.a, Q_pow_);
        cvec vL = combine(t.psi.a, Lpsi_pow_);
        // v(w) + psi'(w) dw, dw = 2 dl w / lam
        cplx s = 2.0 * dl / lam_;
        vL[0] += Pd_[0] * s * W_[0];
        for (int i = 1; i <= n1; ++i) vL[i] += (Pd_[i] * W_[0] + Pd_[i - 1] * W_[1]) * s;
        cvec inner = mul(Ps_, vL, n1);
        cvec chain = mul(Phid_, inner, n1);
        for (int i = 0; i <= n1; ++i)
            out.phi.a[i] = std::conj((uQ[i] + 2.0 * chain[i]) / lam_ - G_[i] * dl / lam_);

        cvec uL = combine(t.phi.a, L2_pow_);
        for (int i = 0; i <= n2; ++i) {
            // phi'(w2) dw2
            cplx lin = Phid2_[i] * s * W2_[0] + (i > 0 ? Phid2_[i - 1] * s * W2_[1] : cplx(0));
            out.psi.a[i] = std::conj((uL[i] + lin) / lam_ - G2_[i] * dl / lam_);
        }
        return out;
    }

    // D P at R(p) applied to (u, v)
    FactorPair apply_projection(const FactorPair& t) const {
        const auto& S = sys_;
        cplx f0 = S.f0, df0 = S.df0, p0 = S.p0, dp0 = S.dp0;
        cplx f2 = f0 * f0, p2 = p0 * p0;
        cplx u0 = evaluate(t.phi, 0.0), du0 = evaluate_d1(t.phi, 0.0);
        cplx v0 = evaluate(t.psi, 0.0), dv0 = evaluate_d1(t.psi, 0.0);
        cplx dc = -v0;
        std::array<cplx, 2> drhs;
        drhs[0] = evaluate(t.psi, f2) + dc + psih_d1_f2_ * 2.0 * f0 * u0 - evaluate(t.phi, p2);
        drhs[1] = (evaluate_d1(t.psi, f2) + psih_d2_f2_ * 2.0 * f0 * u0) * f0 * df0 +
                  psih_d1_f2_ * (u0 * df0 + f0 * du0) - evaluate_d1(t.phi, p2) * p0 * dp0 -
                  phi_d1_p2_ * p0 * dv0;
        drhs[1] -= 2.0 * std::pow(p0, 3) * dv0 * ab_[0] + 3.0 * std::pow(p0, 5) * dv0 * ab_[1];
        auto dab = solve2(S.M, drhs);
        FactorPair out = t;
        for (int k = 0; k <= p_.n1(); ++k) out.phi.a[k] += dab[0] * z2_[k] + dab[1] * z3_[k];
        out.psi.a[0] += dc;
        return out;
    }

    FactorPair apply(const FactorPair& t) const { return apply_projection(apply_renorm(t)); }

private:
    FactorPair p_, R_;
    cplx lam_;
    cvec W_, W2_, Ps_, G_, G2_, Phid_, Pd_, Phid2_, z2_, z3_;
    std::vector<cvec> Q_pow_, Lpsi_pow_, L2_pow_;
    ProjectionSystem sys_;
    cplx det_;
    std::array<cplx, 2> ab_;
    cplx psih_d1_f2_, psih_d2_f2_, phi_d1_p2_;
};

inline FactorPair differential_apply(const FactorPair& p, const FactorPair& t) {
    return DifferentialContext(p).apply(t);
}

// columns in basis order, computed independently and stored by index
inline Mat build_L0(const FactorPair& p, int workers = 1) {
    DifferentialContext ctx(p);
    int n1 = p.n1(), n2 = p.n2(), d = tangent_dim(n1, n2);
    Mat L(d, d);
    parallel_for(d, workers, [&](int j) {
        L.col(j) = pack(ctx.apply(basis_vector(j, n1, n2, p.phi.dom, p.psi.dom)));
    });
    return L;
}

inline double l1(const Vec& x) { return x.lpNorm<1>(); }

// N(z) = z + RG(z0 + M z) - (z0 + M z), M = (I - L0)^{-1}
class NewtonMap {
public:
    NewtonMap(const FactorPair& p0, const Mat& L0)
        : p0_(p0), x0_(pack(p0)), lu_(Mat::Identity(L0.rows(), L0.cols()) - L0) {
        Mat I = Mat::Identity(L0.rows(), L0.cols());
        Mat A = I - L0;
        Vec probe = Vec::Ones(L0.rows());
        Vec r = A * lu_.solve(probe) - probe;
        if (!(r.lpNorm<Eigen::Infinity>() < 1e-8))
            throw error(errc::differential_singular, "I - L0 is singular", r.lpNorm<Eigen::Infinity>());
    }

    Vec M(const Vec& z) const { return lu_.solve(z); }

    Vec operator()(const Vec& z) const {
        Vec x = x0_ + M(z);
        FactorPair q = unpack(x, p0_.n1(), p0_.n2(), p0_.phi.dom, p0_.psi.dom);
        return z + pack(rg(q).pair) - x;
    }

    FactorPair recover(const Vec& z) const {
        return unpack(x0_ + M(z), p0_.n1(), p0_.n2(), p0_.phi.dom, p0_.psi.dom);
    }

private:
    FactorPair p0_;
    Vec x0_;
    Eigen::PartialPivLU<Mat> lu_;
};

inline Vec newton_map(const FactorPair& p0, const Mat& L0, const Vec& z) { return NewtonMap(p0, L0)(z); }

struct Certificate {
    double epsilon = 0;
    double contraction = 0;
    double delta = 0;
    bool verdict = false;
};

inline Vec random_unit_l1(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = g(rng);
    return v / l1(v);
}

// sampled bound on ||DN|| over the delta-ball, times a safety factor of 2
inline Certificate certify(const FactorPair& p0, const Mat& L0, double delta, std::uint64_t seed = 0,
                           int points = 8, int dirs = 16, double h = 1e-5) {
    Certificate c;
    c.delta = delta;
    std::optional<NewtonMap> Nopt;
    try {
        Nopt.emplace(p0, L0);
    } catch (const error& e) {
        if (e.kind != errc::differential_singular) throw;
        c.epsilon = c.contraction = INFINITY;
        return c;
    }
    const NewtonMap& N = *Nopt;
    int d = int(L0.rows());
    c.epsilon = l1(N(Vec::Zero(d)));
    if (!(delta > 0)) return c;
    std::mt19937_64 rng(seed);
    double D = 0;
    for (int k = 0; k <= points; ++k) {
        Vec x = k == 0 ? Vec::Zero(d) : Vec(delta * random_unit_l1(rng, d));
        for (int j = 0; j < dirs; ++j) {
            Vec e = random_unit_l1(rng, d);
            Vec g = (N(x + h * e) - N(x - h * e)) / (2 * h);
            D = std::max(D, l1(g));
        }
    }
    c.contraction = 2 * D;
    c.verdict = c.epsilon < (1 - c.contraction) * delta;
    return c;
}

struct SolveOptions {
    int n1 = 40, n2 = 50;
    int seed_level = 12;
    int rg_steps = 3;
    int max_iters = 25;
    double tol = 1e-10;
    int workers = 1;
    Disk U = U_default, V = V_default;
};

struct SolveStep {
    int index;
    bool newton;
    double step;  // l1 size of the update
    cplx lambda;
    FactorPair pair;
};

struct SolveResult {
    FactorPair pair;
    cplx lambda;
    bool converged = false;
    int iterations = 0;
    std::vector<SolveStep> steps;
};

// rg warm-up from the seed pair, then Newton with the analytic differential
inline SolveResult solve_fixed_point(const SolveOptions& o,
                                     const std::function<void(const SolveStep&)>& on_step = {}) {
    SolveResult r;
    FactorPair p = seed_pair(o.n1, o.n2, o.seed_level, 256, o.U, o.V);
    auto record = [&](bool newton, double step) {
        SolveStep s{r.iterations, newton, step, scaling_factor(p), p};
        if (on_step) on_step(s);
        s.pair = FactorPair{};
        r.steps.push_back(std::move(s));
    };
    while (r.iterations < o.max_iters && r.iterations < o.rg_steps) {
        FactorPair q = rg(p).pair;
        double st = l1(q - p);
        p = std::move(q);
        ++r.iterations;
        record(false, st);
    }
    while (r.iterations < o.max_iters) {
        Mat L = build_L0(p, o.workers);
        Vec F = pack(rg(p).pair) - pack(p);
        Vec dx = Eigen::PartialPivLU<Mat>(Mat::Identity(L.rows(), L.cols()) - L).solve(F);
        p = unpack(pack(p) + dx, o.n1, o.n2, o.U, o.V);
        ++r.iterations;
        double st = l1(dx);
        record(true, st);
        if (st < o.tol) {
            r.converged = true;
            break;
        }
    }
    r.pair = p;
    r.lambda = scaling_factor(p);
    return r;
}

}  // namespace siegel
