#pragma once

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <numeric>

#include "newton.hpp"

namespace siegel {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

struct SpectrumReport {
    cvec eigenvalues;  // sorted by modulus, descending
    std::vector<cplx> unstable;
    double pairing_defect = 0;
    double max_stable_modulus = 0;
    bool one_unstable_pair() const {
        return unstable.size() == 2 && std::abs(unstable[0] + unstable[1]) < 1e-6 * std::abs(unstable[0]);
    }
};

// descending modulus; ties broken by real then imaginary part
inline std::vector<int> modulus_order(const cvec& ev) {
    std::vector<int> o(ev.size());
    std::iota(o.begin(), o.end(), 0);
    std::stable_sort(o.begin(), o.end(), [&](int a, int b) {
        double ma = std::abs(ev[a]), mb = std::abs(ev[b]);
        if (std::abs(ma - mb) > 1e-12 * std::max(1.0, ma)) return ma > mb;
        if (ev[a].real() != ev[b].real()) return ev[a].real() > ev[b].real();
        return ev[a].imag() > ev[b].imag();
    });
    return o;
}

// greedy lambda <-> -lambda matching
inline double pairing_defect(const cvec& ev) {
    int n = int(ev.size());
    std::vector<bool> used(n, false);
    double worst = 0;
    for (int i = 0; i < n; ++i) {
        if (used[i]) continue;
        int best = i;
        double bd = std::abs(2.0 * ev[i]);
        for (int j = 0; j < n; ++j) {
            if (used[j] || j == i) continue;
            double dj = std::abs(ev[i] + ev[j]);
            if (dj < bd) {
                bd = dj;
                best = j;
            }
        }
        used[i] = used[best] = true;
        worst = std::max(worst, bd);
    }
    return worst;
}

inline SpectrumReport spectrum(const Mat& L0) {
    if (L0.rows() != L0.cols()) throw error(errc::spectral, "matrix not square");
    SpectrumReport r;
    if (L0.rows() == 0) return r;
    Eigen::EigenSolver<Mat> es(L0, false);
    if (es.info() != Eigen::Success) throw error(errc::spectral, "eigensolver did not converge");
    cvec ev(L0.rows());
    for (int i = 0; i < L0.rows(); ++i) ev[i] = es.eigenvalues()[i];
    for (int i : modulus_order(ev)) r.eigenvalues.push_back(ev[i]);
    r.pairing_defect = pairing_defect(r.eigenvalues);
    for (auto z : r.eigenvalues) {
        if (std::abs(z) > 1) r.unstable.push_back(z);
        else r.max_stable_modulus = std::max(r.max_stable_modulus, std::abs(z));
    }
    return r;
}

// dominant eigenvalue modulus of L0^2, square-rooted
inline double power_iteration_modulus(const Mat& L0, int iters = 500, double tol = 1e-14) {
    Vec x = Vec::Ones(L0.rows());
    for (int i = 0; i < L0.rows(); ++i) x[i] += 0.001 * i;
    x /= x.norm();
    double mu = 0;
    for (int k = 0; k < iters; ++k) {
        Vec y = L0 * (L0 * x);
        double m = y.norm();
        if (m == 0) return 0;
        double nmu = x.dot(y);
        x = y / m;
        if (k > 3 && std::abs(nmu - mu) < tol * std::abs(nmu)) {
            mu = nmu;
            break;
        }
        mu = nmu;
    }
    return std::sqrt(std::abs(mu));
}

// real eigenvector for a real eigenvalue, refined by inverse iteration
inline Vec inverse_iteration(const Mat& L0, double mu, Vec x, int iters = 4) {
    Mat A = L0 - (mu * (1 + 1e-10)) * Mat::Identity(L0.rows(), L0.cols());
    Eigen::PartialPivLU<Mat> lu(A);
    for (int k = 0; k < iters; ++k) {
        x = lu.solve(x);
        x /= x.lpNorm<1>();
    }
    return x;
}

struct ProjectedContraction {
    double norm_T3 = 0;             // with the two unstable projectors
    double norm_T3_unprojected = 0;  // S0 = S1 = 0
    double basis_condition = 0;
    int rank = 0;  // eigenvector columns used
};

// real/imag columns for eigenvalues in `sel` (upper half plane representatives)
inline Mat realify(const CMat& V, const std::vector<int>& sel, const cvec& ev) {
    std::vector<Vec> cols;
    for (int i : sel) {
        if (ev[i].imag() > 1e-12) {
            cols.push_back(V.col(i).real());
            cols.push_back(V.col(i).imag());
        } else {
            cols.push_back(V.col(i).real());
        }
    }
    Mat R(V.rows(), int(cols.size()));
    for (int j = 0; j < int(cols.size()); ++j) R.col(j) = cols[j];
    return R;
}

// Basis: leading eigenvectors of L0 followed by a basis of the complementary invariant subspace
// (annihilator of the matching left eigenvectors). e0, e1 are the first two columns.
inline ProjectedContraction projected_contraction(const Mat& L0, int E1 = 11, int E2 = 12) {
    int d = int(L0.rows());
    int K = std::min(d, 2 * (E1 + 1) + 2 * (E2 + 1));
    Eigen::EigenSolver<Mat> er(L0, true), el(L0.transpose(), true);
    if (er.info() != Eigen::Success || el.info() != Eigen::Success)
        throw error(errc::spectral, "eigensolver did not converge");
    cvec wr(d), wl(d);
    for (int i = 0; i < d; ++i) {
        wr[i] = er.eigenvalues()[i];
        wl[i] = el.eigenvalues()[i];
    }
    auto order = modulus_order(wr);

    // take whole conjugate pairs until K real columns are reached
    std::vector<int> sel;
    int cols = 0;
    for (int i : order) {
        if (cols >= K) break;
        if (wr[i].imag() < -1e-12) continue;
        sel.push_back(i);
        cols += wr[i].imag() > 1e-12 ? 2 : 1;
    }
    // matching left eigenvalues
    std::vector<int> lsel;
    std::vector<bool> used(d, false);
    for (int i : sel) {
        int best = -1;
        double bd = 1e300;
        for (int j = 0; j < d; ++j) {
            if (used[j]) continue;
            if ((wr[i].imag() > 1e-12) != (wl[j].imag() > 1e-12)) continue;
            if (wl[j].imag() < -1e-12) continue;
            double dj = std::abs(wl[j] - wr[i]);
            if (dj < bd) {
                bd = dj;
                best = j;
            }
        }
        if (best < 0) throw error(errc::basis, "left/right spectra do not match");
        used[best] = true;
        lsel.push_back(best);
    }
    CMat Vr = er.eigenvectors(), Vl = el.eigenvectors();
    Mat R = realify(Vr, sel, wr);
    for (int j = 0; j < R.cols(); ++j) R.col(j) /= R.col(j).lpNorm<1>();
    Mat L = realify(Vl, lsel, wl);
    int k = int(R.cols());
    // the top pair must be real: refine it
    if (std::abs(wr[sel[0]].imag()) < 1e-12) R.col(0) = inverse_iteration(L0, wr[sel[0]].real(), R.col(0));
    if (sel.size() > 1 && std::abs(wr[sel[1]].imag()) < 1e-12)
        R.col(1) = inverse_iteration(L0, wr[sel[1]].real(), R.col(1));

    Eigen::JacobiSVD<Mat> svd(L.transpose(), Eigen::ComputeFullV);
    Mat C = svd.matrixV().rightCols(d - k);
    Mat B(d, d);
    B << R, C;
    Eigen::JacobiSVD<Mat> sb(B);
    double smin = sb.singularValues()(d - 1);
    ProjectedContraction out;
    out.rank = k;
    out.basis_condition = smin > 0 ? sb.singularValues()(0) / smin : INFINITY;
    if (!(smin > 1e-13 * sb.singularValues()(0))) throw error(errc::basis, "basis matrix is singular", smin);
    Eigen::PartialPivLU<Mat> lu(B);
    Mat D = lu.solve(L0 * B);
    Mat P = Mat::Identity(d, d);
    P(0, 0) = P(1, 1) = 0;
    Mat T = P * D * P;
    auto colsum = [](const Mat& A) { return A.cwiseAbs().colwise().sum().maxCoeff(); };
    out.norm_T3 = colsum(T * T * T);
    out.norm_T3_unprojected = colsum(D * D * D);
    return out;
}

// ---- invariant lines of lambda o c ----

struct InvariantLines {
    double a_plus = 0, a_minus = 0;
    cplx v_plus, v_minus;  // unit vectors of t + i a t
};

inline double line_residual(cplx lam, double a) { return a * a * lam.imag() + 2 * a * lam.real() - lam.imag(); }

inline InvariantLines invariant_lines(cplx lam) {
    if (std::abs(lam.imag()) < 1e-14) throw error(errc::degenerate_line, "Im lambda vanishes", lam.imag());
    InvariantLines l;
    l.a_plus = (-lam.real() + std::abs(lam)) / lam.imag();
    l.a_minus = (-lam.real() - std::abs(lam)) / lam.imag();
    l.v_plus = cplx(1, l.a_plus) / std::abs(cplx(1, l.a_plus));
    l.v_minus = cplx(1, l.a_minus) / std::abs(cplx(1, l.a_minus));
    return l;
}

// angle between a line and its image under z -> lam conj(z), modulo pi
inline double line_image_defect(cplx lam, cplx v) {
    double d = std::arg(lam * std::conj(v)) - std::arg(v);
    d = std::remainder(d, pi);
    return std::abs(d);
}

// ---- cone machinery ----

struct ConeReport {
    double item1_residual = 0;
    cplx item1_value;
    double item2_arg = 0;
    double item3_tailsum = 0;
    std::vector<double> item3_terms;
    double item4_a = 0, item4_b = 0;
};

inline cplx deta(const FactorPair& p, cplx x) { return p.deta(x); }

inline cplx item3_point(const FactorPair& p, cplx lam, int n) {
    double l2 = std::norm(lam);
    return p.deta(p.xi(lam * std::pow(l2, n)));
}

// rotation bound ln((1+|w|)/(1-|w|)) at the preimage w of xi(lam conj z)^2 in the unit disk
// under y -> l(M(y)), M moving 0 to a = l^{-1}(1)
inline double rotation_bound(const FactorPair& p, cplx lam, cplx z) {
    const Disk& U = p.phi.dom;
    cplx a = U.scaled(1.0);
    cplx x = p.xi(lam * std::conj(z));
    cplx y = U.scaled(x * x);
    double w = std::abs((y - a) / (1.0 - std::conj(a) * y));
    if (w >= 1) return INFINITY;
    return std::log((1 + w) / (1 - w));
}

inline ConeReport cone_bounds(const FactorPair& p, cplx lam, int n_terms = 10, int grid = 256) {
    ConeReport r;
    double l2 = std::norm(lam);
    r.item1_value = p.deta(p.xi(0.0));
    r.item1_residual = std::abs(r.item1_value - 1.0 / l2);
    r.item2_arg = std::abs(std::arg(p.deta(l2)));
    double s = 0;
    for (int n = 1; n <= n_terms; ++n) {
        double t = std::abs(std::arg(item3_point(p, lam, n)));
        r.item3_terms.push_back(t);
        s += t;
    }
    double last = r.item3_terms.empty() ? 0 : r.item3_terms.back();
    r.item3_tailsum = s + last * l2 / (1 - l2);
    r.item4_a = rotation_bound(p, lam, l2);
    for (int j = 0; j <= grid; ++j)
        r.item4_b = std::max(r.item4_b, rotation_bound(p, lam, l2 * l2 * double(j) / grid));
    return r;
}

struct Cone {
    cplx dir;  // unit
    double angle;
};

inline double angle_from(cplx v, cplx x) { return std::abs(std::remainder(std::arg(x) - std::arg(v), 2 * pi)); }

// rays of a cone, boundary included
inline std::vector<cplx> cone_rays(const Cone& c, int rays) {
    std::vector<cplx> out;
    for (int j = 0; j < rays; ++j) {
        double t = rays == 1 ? 0 : -1 + 2.0 * j / (rays - 1);
        out.push_back(c.dir * std::polar(1.0, t * c.angle));
    }
    return out;
}

// largest deviation from `v` of the image of the cone under a real-linear map
template <class F>
double reach(const Cone& c, cplx v, F&& map, int rays) {
    double m = 0;
    for (cplx x : cone_rays(c, rays)) m = std::max(m, angle_from(v, map(x)));
    return m;
}

struct ConeAngles {
    double alpha_l2 = std::acos(0.5967);  // cone at |lambda|^2
    double alpha_0 = std::acos(0.71);     // cone at 0
    double widening = -1;                 // eps of part 4; negative: use the computed sup bound
    double source_scale = 1;              // multiplies the source cone at 1 (negative control)
};

struct ConeCheck {
    double margin_0 = 0, margin_1 = 0;
    std::vector<double> margin_2n;  // n = 1..N
    double threshold = 1e-3;
    bool ok() const {
        if (!(margin_0 > threshold && margin_1 > threshold)) return false;
        for (double m : margin_2n)
            if (!(m > threshold)) return false;
        return true;
    }
};

inline ConeCheck cone_invariance_check(const FactorPair& p, cplx lam, ConeAngles ang = {}, int levels = 8,
                                       int rays = 64, int n_terms = 40) {
    ConeCheck out;
    double l2 = std::norm(lam);
    ConeReport cb = cone_bounds(p, lam, n_terms);
    double eps = ang.widening >= 0 ? ang.widening : cb.item4_b;
    cplx lt = lam / std::conj(p.deta(l2));
    cplx v = invariant_lines(lt).v_plus;
    auto c_inv = [&](cplx z) { return std::conj(z / lam); };  // c o lambda^{-1}
    auto ct_inv = [&](cplx z) { return std::conj(z / lt); };

    // point 1: T(u)(1) = c lam^{-1}(u + c lt^{-1} u), u in C(v, alpha_l2)
    Cone src1{v, ang.alpha_l2 * ang.source_scale};
    cplx v1 = c_inv(v) / std::abs(c_inv(v));
    out.margin_1 = ang.alpha_l2 - reach(src1, v1, [&](cplx u) { return c_inv(u + ct_inv(u)); }, rays);

    // cone at 1 pulled back by c o lam^{-1}: first summand at 0 and at |lambda|^{2n}
    auto first = [&](double widen) {
        return reach(Cone{v1, ang.alpha_l2 + widen}, v, c_inv, rays);
    };

    // a sum lies strictly inside when one summand does and the other stays in the closed cone
    auto sum_margin = [](double target, double r1, double r2) {
        return r2 <= target + 1e-12 ? target - r1 : std::min(target - r1, target - r2);
    };

    // point 0
    cplx a0 = cb.item1_value;
    double r0 = reach(Cone{v, ang.alpha_0}, v, [&](cplx x) { return c_inv(a0 * c_inv(x)); }, rays);
    out.margin_0 = sum_margin(ang.alpha_0, first(0), r0);

    // |lambda|^{2n}: cone angle alpha_0 + sum_{i>=n} |arg a_i| (n >= 2), alpha_l2 at n = 1
    std::vector<double> tail(n_terms + 2, 0);
    for (int i = n_terms; i >= 1; --i) tail[i] = tail[i + 1] + cb.item3_terms[i - 1];
    auto beta = [&](int n) { return n == 1 ? ang.alpha_l2 : ang.alpha_0 + tail[std::min(n, n_terms + 1)]; };
    double f1 = first(eps);
    for (int n = 1; n <= levels; ++n) {
        cplx an = item3_point(p, lam, n);
        double r2 = reach(Cone{v, beta(n + 1)}, v, [&](cplx x) { return c_inv(an * c_inv(x)); }, rays);
        out.margin_2n.push_back(sum_margin(beta(n), f1, r2));
    }
    return out;
}

}  // namespace siegel
