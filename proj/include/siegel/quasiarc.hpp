#pragma once

#include <algorithm>
#include <limits>
#include <string>

#include "renorm.hpp"
#include "parallel.hpp"

namespace siegel {

// (a1, b1, ..., an, bn); zeta^s = xi^bn o eta^an o ... o xi^b1 o eta^a1
struct MultiIndex {
    std::vector<int> w;

    int blocks() const { return int(w.size()) / 2; }
    int a(int j) const { return w[2 * j]; }  // 0-based block
    int b(int j) const { return w[2 * j + 1]; }
    int count_eta() const {
        int s = 0;
        for (int j = 0; j < blocks(); ++j) s += a(j);
        return s;
    }
    int count_xi() const {
        int s = 0;
        for (int j = 0; j < blocks(); ++j) s += b(j);
        return s;
    }
    int length() const { return count_eta() + count_xi(); }
    bool operator==(const MultiIndex& o) const { return w == o.w; }

    std::string str() const {
        std::string s = "(";
        for (size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
        return s + ")";
    }
};

// letters in application order: 0 = eta, 1 = xi
inline std::vector<int> letters(const MultiIndex& m) {
    std::vector<int> l;
    for (int j = 0; j < m.blocks(); ++j) {
        l.insert(l.end(), m.a(j), 0);
        l.insert(l.end(), m.b(j), 1);
    }
    return l;
}

inline MultiIndex from_letters(const std::vector<int>& l) {
    MultiIndex m;
    size_t i = 0;
    do {
        int a = 0, b = 0;
        while (i < l.size() && l[i] == 0) ++a, ++i;
        while (i < l.size() && l[i] == 1) ++b, ++i;
        m.w.push_back(a);
        m.w.push_back(b);
    } while (i < l.size());
    return m;
}

// positivity pattern of the index space
inline bool admissible(const MultiIndex& m) {
    int n = m.blocks();
    if (n == 0 || m.w.size() % 2) return false;
    for (int j = 0; j < n; ++j) {
        if (m.a(j) < 0 || m.b(j) < 0) return false;
        if (j >= 1 && m.a(j) < 1) return false;
        if (j <= n - 2 && m.b(j) < 1) return false;
    }
    return true;
}

// s > t: t = (a1,b1,...,ak,bk,c,d), k < n, with c < a_{k+1}, d = 0 or c = a_{k+1}, d < b_{k+1}
inline bool precedes(const MultiIndex& t, const MultiIndex& s) {
    int n = s.blocks(), k = t.blocks() - 1;
    if (k < 0 || k >= n) return false;
    for (int j = 0; j < k; ++j)
        if (t.a(j) != s.a(j) || t.b(j) != s.b(j)) return false;
    int c = t.a(k), d = t.b(k);
    return (c < s.a(k) && d == 0) || (c == s.a(k) && d < s.b(k));
}

// q with zeta^q o zeta^t = zeta^s
inline MultiIndex word_subtract(const MultiIndex& s, const MultiIndex& t) {
    if (!precedes(t, s)) throw error(errc::ordering, "word_subtract: s does not succeed t");
    int n = s.blocks(), k = t.blocks() - 1;
    int c = t.a(k), d = t.b(k);
    MultiIndex q;
    if (d == 0) {
        q.w.push_back(s.a(k) - c);
        q.w.push_back(s.b(k));
        for (int j = k + 1; j < n; ++j) q.w.insert(q.w.end(), {s.a(j), s.b(j)});
    } else {
        q.w.push_back(0);
        q.w.push_back(s.b(k) - d);
        for (int j = k + 1; j < n; ++j) q.w.insert(q.w.end(), {s.a(j), s.b(j)});
    }
    return q;
}

// second case with a_{k+1} repeated in place of a_{k+2}, kept for comparison
inline MultiIndex word_subtract_literal(const MultiIndex& s, const MultiIndex& t) {
    MultiIndex q = word_subtract(s, t);
    int k = t.blocks() - 1;
    if (t.b(k) != 0 && q.blocks() > 1) q.w[2] = s.a(k);
    return q;
}

// every t with t < s, shortest first: all proper initial segments of the letter sequence
inline std::vector<MultiIndex> predecessors(const MultiIndex& s) {
    std::vector<int> l = letters(s);
    std::vector<MultiIndex> out;
    for (size_t len = 0; len < l.size(); ++len) {
        MultiIndex t = from_letters(std::vector<int>(l.begin(), l.begin() + len));
        // a prefix ending on a block boundary opens the next block with (0, 0)
        if (len > 0 && l[len - 1] == 1 && l[len] == 0) t.w.insert(t.w.end(), {0, 0});
        out.push_back(t);
    }
    return out;
}

// (eta, xi) -> (eta o xi, eta), n times
inline std::pair<MultiIndex, MultiIndex> renorm_words(int n) {
    if (n < 0) throw error(errc::config, "renorm_words: negative level");
    std::vector<int> s{0}, t{1};
    for (int i = 0; i < n; ++i) {
        std::vector<int> ns = t;
        ns.insert(ns.end(), s.begin(), s.end());
        t = s;
        s = std::move(ns);
    }
    return {from_letters(s), from_letters(t)};
}

// ---- rigid model ----

struct RigidPair {
    double theta = golden_theta();
    double f_shift() const { return 2 * theta - 1; }
    double g_shift() const { return theta - 1; }
    double f(double x) const { return x + f_shift(); }
    double g(double x) const { return x + g_shift(); }
    double shift(const MultiIndex& m) const { return m.count_eta() * f_shift() + m.count_xi() * g_shift(); }
    double apply(const MultiIndex& m, double x) const { return x + shift(m); }
    // x -> (-theta)^n x
    double scale(int n) const { return std::pow(-theta, n); }
};

struct Piece {
    MultiIndex word;
    char type;  // 'I'/'J' in the model, 'Z'/'W' for the pair
    double lo = 0, hi = 0;
    std::vector<cplx> boundary;
    bool flagged = false;
};

struct Partition {
    int level = 0;
    std::vector<Piece> pieces;
};

inline Partition partition_model(int n, const RigidPair& H = {}) {
    if (n < 0 || n > 24) throw error(errc::config, "partition level out of range");
    auto [s, t] = renorm_words(n);
    double In = H.shift(t), Jn = H.shift(s);  // g_n(0), f_n(0)
    Partition P;
    P.level = n;
    for (auto& w : predecessors(s)) {
        double a = H.apply(w, 0), b = H.apply(w, In);
        P.pieces.push_back({w, 'I', std::min(a, b), std::max(a, b), {}, false});
    }
    for (auto& w : predecessors(t)) {
        double a = H.apply(w, 0), b = H.apply(w, Jn);
        P.pieces.push_back({w, 'J', std::min(a, b), std::max(a, b), {}, false});
    }
    return P;
}

struct CoverageReport {
    double worst_gap = 0, worst_overlap = 0;
    double lo = 0, hi = 0, measure = 0;
};

inline CoverageReport coverage(const Partition& P) {
    std::vector<std::pair<double, double>> iv;
    for (auto& p : P.pieces) iv.push_back({p.lo, p.hi});
    std::sort(iv.begin(), iv.end());
    CoverageReport r;
    r.lo = iv.front().first;
    r.hi = iv.front().second;
    for (size_t i = 0; i < iv.size(); ++i) {
        r.measure += iv[i].second - iv[i].first;
        if (i) {
            double d = iv[i].first - iv[i - 1].second;
            r.worst_gap = std::max(r.worst_gap, d);
            r.worst_overlap = std::max(r.worst_overlap, -d);
        }
        r.hi = std::max(r.hi, iv[i].second);
    }
    return r;
}

// ---- the pair side ----

inline cplx apply_word(const FactorPair& p, const MultiIndex& m, cplx x, bool* outside = nullptr) {
    for (int l : letters(m)) {
        const TaylorDisk& f = l == 0 ? p.phi : p.psi;
        cplx q = x * x;
        if (outside && !f.dom.contains(q)) *outside = true;
        x = evaluate(f, q);
    }
    return x;
}

// Lambda_n = (lambda o c)^n
inline cplx Lambda(cplx lam, int n, cplx z) {
    for (int i = 0; i < n; ++i) z = lam * std::conj(z);
    return z;
}

// boundary of q2^{-1}(D): sqrt along a continuous branch over two turns (D contains 0)
inline std::vector<cplx> sqrt_preimage_boundary(const Disk& D, int samples = 128) {
    std::vector<cplx> out;
    cplx prev = std::sqrt(D.unscaled(1.0));
    for (int j = 0; j < samples; ++j) {
        cplx q = D.unscaled(std::polar(1.0, 4 * pi * j / samples));
        cplx x = std::sqrt(q);
        if (std::abs(x - prev) > std::abs(x + prev)) x = -x;
        out.push_back(x);
        prev = x;
    }
    return out;
}

inline Partition partition_dynamical(const FactorPair& p, int n, int samples = 128, int workers = 1) {
    if (n < 0 || n > 6) throw error(errc::config, "dynamical partition level out of range");
    cplx lam = evaluate(p.phi, 0.0);
    auto [s, t] = renorm_words(n);
    auto Zb = sqrt_preimage_boundary(p.phi.dom, samples);
    auto Wb = sqrt_preimage_boundary(p.psi.dom, samples);
    Partition P;
    P.level = n;
    for (auto& w : predecessors(s)) P.pieces.push_back({w, 'Z', 0, 0, {}, false});
    for (auto& w : predecessors(t)) P.pieces.push_back({w, 'W', 0, 0, {}, false});
    parallel_for(int(P.pieces.size()), workers, [&](int i) {
        Piece& pc = P.pieces[i];
        const auto& base = pc.type == 'Z' ? Zb : Wb;
        bool out = false;
        for (cplx z : base) pc.boundary.push_back(apply_word(p, pc.word, Lambda(lam, n, z), &out));
        pc.flagged = out;
    });
    return P;
}

inline double diameter(const std::vector<cplx>& pts) {
    double d = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, std::abs(pts[i] - pts[j]));
    return d;
}

inline double segment_distance(cplx a, cplx b, cplx c, cplx d) {
    auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
    auto point_seg = [](cplx p, cplx u, cplx v) {
        cplx e = v - u;
        double L = std::norm(e);
        double t = L > 0 ? std::clamp(((p - u) * std::conj(e)).real() / L, 0.0, 1.0) : 0.0;
        return std::abs(p - (u + t * e));
    };
    double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0;
    return std::min({point_seg(a, c, d), point_seg(b, c, d), point_seg(c, a, b), point_seg(d, a, b)});
}

// distance between closed polylines
inline double polyline_distance(const std::vector<cplx>& P, const std::vector<cplx>& Q) {
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < P.size(); ++i)
        for (size_t j = 0; j < Q.size(); ++j)
            m = std::min(m, segment_distance(P[i], P[(i + 1) % P.size()], Q[j], Q[(j + 1) % Q.size()]));
    return m;
}

inline bool point_in_polygon(cplx z, const std::vector<cplx>& P) {
    bool in = false;
    for (size_t i = 0, j = P.size() - 1; i < P.size(); j = i++) {
        if ((P[i].imag() > z.imag()) != (P[j].imag() > z.imag())) {
            double x = P[j].real() + (z.imag() - P[j].imag()) * (P[i].real() - P[j].real()) /
                                         (P[i].imag() - P[j].imag());
            if (z.real() < x) in = !in;
        }
    }
    return in;
}

inline bool polygons_intersect(const std::vector<cplx>& P, const std::vector<cplx>& Q) {
    return polyline_distance(P, Q) == 0 || point_in_polygon(P[0], Q) || point_in_polygon(Q[0], P);
}

// ---- arc ----

struct ArcPoint {
    double t;
    cplx z;
    double diam;  // diameter of the level-depth domain containing z
    std::vector<int> address;  // piece index per level 0..depth
};

// index of the model piece containing x (first in partition order)
inline int locate(const Partition& P, double x, double tol = 1e-14) {
    for (size_t i = 0; i < P.pieces.size(); ++i)
        if (x >= P.pieces[i].lo - tol && x <= P.pieces[i].hi + tol) return int(i);
    return -1;
}

// initial arc on I u J: linear through 0, xi(0) = 1, eta(0) = lambda
inline cplx gamma_linear(const RigidPair& H, cplx lam, double y) {
    return y <= 0 ? cplx(y / H.g(0)) : (y / H.f(0)) * lam;
}

// x'' = M_d^{-1}(H^{-w}(x)) for the level-d piece containing x
struct ArcAddress {
    int piece;
    double y;
};

inline ArcAddress arc_address(const Partition& P, const RigidPair& H, double x) {
    int i = locate(P, x);
    if (i < 0) throw error(errc::config, "arc parameter outside I u J", x);
    return {i, (x - H.shift(P.pieces[i].word)) / H.scale(P.level)};
}

// piecewise linear through the images of the level-m partition endpoints (orbit points of 0)
struct ArcSeed {
    std::vector<double> x;
    std::vector<cplx> z;

    cplx operator()(double y) const {
        auto it = std::upper_bound(x.begin(), x.end(), y);
        size_t j = std::clamp<size_t>(size_t(it - x.begin()), 1, x.size() - 1);
        double t = (y - x[j - 1]) / (x[j] - x[j - 1]);
        return z[j - 1] + t * (z[j] - z[j - 1]);
    }
};

inline ArcSeed arc_seed(const FactorPair& p, int m) {
    RigidPair H;
    cplx lam = evaluate(p.phi, 0.0);
    Partition P = partition_model(m, H);
    std::vector<double> xs;
    for (auto& pc : P.pieces) xs.insert(xs.end(), {pc.lo, pc.hi});
    std::sort(xs.begin(), xs.end());
    ArcSeed s;
    for (double x : xs) {
        if (!s.x.empty() && x - s.x.back() < 1e-12) continue;
        s.x.push_back(x);
    }
    for (double x : s.x) {
        // endpoints sit where the linear seed is exact, so both neighbouring pieces agree
        ArcAddress a = arc_address(P, H, x);
        s.z.push_back(apply_word(p, P.pieces[a.piece].word, Lambda(lam, m, gamma_linear(H, lam, a.y))));
    }
    return s;
}

// phi(x) = zeta^w(Lambda_d(gamma0(x''))), x'' = M_d^{-1}(H^{-w}(x)), gamma0 the level-m seed arc
inline std::vector<ArcPoint> arc_points(const FactorPair& p, int depth, int resolution, int workers = 1,
                                        int seed_level = 6, bool with_diameters = true) {
    if (depth < 0 || depth > 6) throw error(errc::config, "arc depth out of range");
    if (resolution < 2) throw error(errc::config, "arc resolution must be >= 2");
    RigidPair H;
    cplx lam = evaluate(p.phi, 0.0);
    std::vector<Partition> model;
    for (int n = 0; n <= depth; ++n) model.push_back(partition_model(n, H));
    ArcSeed g0 = arc_seed(p, seed_level);
    Partition dyn;
    if (with_diameters) dyn = partition_dynamical(p, depth, 64, workers);
    double lo = H.g(0), hi = H.f(0);
    std::vector<ArcPoint> out(resolution);
    parallel_for(resolution, workers, [&](int i) {
        double x = lo + (hi - lo) * i / (resolution - 1);
        ArcPoint ap;
        ap.t = x;
        for (auto& P : model) ap.address.push_back(locate(P, x));
        ArcAddress a = arc_address(model[depth], H, x);
        ap.z = apply_word(p, model[depth].pieces[a.piece].word, Lambda(lam, depth, g0(a.y)));
        ap.diam = with_diameters ? diameter(dyn.pieces[a.piece].boundary) : 0;
        out[i] = ap;
    });
    return out;
}

}  // namespace siegel
