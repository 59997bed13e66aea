// one PASS/FAIL line per acceptance criterion; nonzero exit if any fails
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "siegel/quasiarc.hpp"
#include "siegel/spectral.hpp"
#include "siegel/twod.hpp"

using namespace siegel;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int k, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", k, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char* f, auto... a) {
    char b[512];
    std::snprintf(b, sizeof b, f, a...);
    return b;
}

double max_abs(const cvec& v) {
    double m = 0;
    for (auto x : v) m = std::max(m, std::abs(x));
    return m;
}

SolveResult solve(int n1, int n2) {
    SolveOptions o;
    o.n1 = n1;
    o.n2 = n2;
    return solve_fixed_point(o);
}

FactorPair perturbed(const FactorPair& p, double eps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    FactorPair q = p;
    for (int k = 0; k < 8; ++k) {
        q.phi.a[k] += eps * cplx(u(rng), u(rng));
        q.psi.a[k] += eps * cplx(u(rng), u(rng));
    }
    return q;
}

void criterion1(const SolveResult& r, double seconds) {
    cplx ref(0.220265, -0.708481);
    double err = std::abs(r.lambda - ref);
    double last = r.steps.empty() ? INFINITY : r.steps.back().step;
    bool pass = r.converged && last < 1e-10 && r.iterations <= 25 && err < 1e-5 && seconds < 60;
    report(1, pass,
           fmt("converged=%d iterations=%d last_step=%.2e lambda=%.10f%+.10fi |lambda-ref|=%.2e |lambda+ref|=%.2e "
               "time=%.1fs",
               int(r.converged), r.iterations, last, r.lambda.real(), r.lambda.imag(), err,
               std::abs(r.lambda + ref), seconds));
}

void criterion2() {
    SolveResult r = solve(200, 260);
    auto res = residuals(r.pair);
    double h = max_abs(higher_commutator_coeffs(r.pair, 12));
    bool pass = r.converged && res.max_abs() < 1e-10 && h < 1e-8;
    report(2, pass, fmt("(200/260) residual=%.2e commutator through order 12=%.2e", res.max_abs(), h));
}

// brute-force (a, b) by Newton with a difference Jacobian
std::array<cplx, 2> brute_force_ab(const FactorPair& p) {
    cplx c = 1.0 - evaluate(p.psi, 0.0);
    cplx a = 0, b = 0;
    auto F = [&](cplx x, cplx y) {
        auto r = residuals(apply_correction(p, x, y, c));
        return std::array<cplx, 2>{r.r0, r.r2};
    };
    for (int it = 0; it < 20; ++it) {
        auto f = F(a, b);
        double h = 1e-7;
        auto fa = F(a + h, b), fb = F(a, b + h);
        auto d = solve2({(fa[0] - f[0]) / h, (fb[0] - f[0]) / h, (fa[1] - f[1]) / h, (fb[1] - f[1]) / h}, f);
        a -= d[0];
        b -= d[1];
    }
    return {a, b};
}

void criterion3(const FactorPair& p) {
    double det = 0, idem = 0, brute = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        FactorPair q = perturbed(p, 1e-3, s);
        auto [out, pc] = project(q);
        det = std::max(det, std::abs(pc.det - pc.det_closed) / std::abs(pc.det_closed));
        auto again = project(out).second;
        idem = std::max({idem, std::abs(again.a), std::abs(again.b), std::abs(again.c)});
        auto ab = brute_force_ab(q);
        brute = std::max({brute, std::abs(ab[0] - pc.a), std::abs(ab[1] - pc.b)});
    }
    report(3, det < 1e-12 && idem < 1e-12 && brute < 1e-10,
           fmt("det relative=%.2e idempotence=%.2e brute-force=%.2e", det, idem, brute));
}

void criterion4(const FactorPair& p, const Mat& L) {
    DifferentialContext ctx(p);
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0, h = 1e-6;
    int n1 = p.n1(), n2 = p.n2();
    for (int s = 0; s < 5; ++s) {
        Vec x(tangent_dim(n1, n2));
        for (int i = 0; i < x.size(); ++i) x[i] = u(rng) * std::pow(0.6, i % (n1 + n2 + 2) % 12);
        FactorPair t = unpack(x, n1, n2);
        FactorPair fd = (0.5 / h) * (rg(p + h * t).pair - rg(p - h * t).pair);
        worst = std::max(worst, l1(ctx.apply(t) - fd) / l1(fd));
    }
    Mat J = complex_structure(n1, n2);
    double anti = (L * J + J * L).lpNorm<Eigen::Infinity>();
    report(4, worst < 1e-5 && anti < 1e-10, fmt("finite differences relative=%.2e |L0 J + J L0|=%.2e", worst, anti));
}

void criterion5(const FactorPair& p, const Mat& L) {
    auto s = spectrum(L);
    auto pc = projected_contraction(L);
    auto c = certify(p, L, 1e-6);
    bool pass = s.pairing_defect < 1e-6 && s.one_unstable_pair() && s.max_stable_modulus < 1 && pc.norm_T3 < 1 &&
                pc.norm_T3_unprojected > 1 && c.verdict && c.epsilon < 1e-9 && c.contraction < 0.9;
    report(5, pass,
           fmt("pairing=%.2e unstable=%zu (|mu|=%.8f) max stable=%.4f |T^3|=%.4f unprojected=%.3f eps=%.2e D=%.2e "
               "verdict=%d",
               s.pairing_defect, s.unstable.size(), s.unstable.empty() ? 0.0 : std::abs(s.unstable[0]),
               s.max_stable_modulus, pc.norm_T3, pc.norm_T3_unprojected, c.epsilon, c.contraction, int(c.verdict)));
}

void criterion6() {
    SolveResult r = solve(200, 260);
    auto cb = cone_bounds(r.pair, r.lambda);
    auto cc = cone_invariance_check(r.pair, r.lambda);
    double arith = std::acos(0.5967) - std::acos(0.71);
    double m2 = INFINITY;
    for (double m : cc.margin_2n) m2 = std::min(m2, m);
    bool pass = cb.item1_residual < 1e-6 && cb.item2_arg < 1.062 && cb.item3_tailsum < 0.075 && cc.ok() &&
                arith > 0.075;
    report(6, pass,
           fmt("(200/260) item1=%.2e item2=%.6f item3=%.4f margins 0=%.4f 1=%.4f min|lambda|^2n=%.4f headroom=%.4f",
               cb.item1_residual, cb.item2_arg, cb.item3_tailsum, cc.margin_0, cc.margin_1, m2, arith));
}

MultiIndex random_word(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> blocks(1, 4), small(1, 3), any(0, 3);
    int n = blocks(rng);
    MultiIndex m;
    for (int j = 0; j < n; ++j) {
        m.w.push_back(j == 0 ? any(rng) : small(rng));
        m.w.push_back(j == n - 1 ? any(rng) : small(rng));
    }
    if (m.length() == 0) m.w[0] = 1;
    return m;
}

double apply_affine(const MultiIndex& m, double x) {
    for (int l : letters(m)) x = l == 0 ? 0.5 * x + 0.3 : -0.7 * x + 0.1;
    return x;
}

void criterion7(const FactorPair& p) {
    double gap = 0;
    for (int n = 0; n <= 12; ++n) {
        auto c = coverage(partition_model(n));
        gap = std::max({gap, c.worst_gap, c.worst_overlap, std::abs(c.measure - golden_theta())});
    }
    bool fib = true;
    long a = 1, b = 1;  // F_n, F_{n+1}
    for (int n = 1; n <= 15; ++n) {
        auto [s, t] = renorm_words(n);
        fib = fib && s.count_eta() == b && s.count_xi() == a;
        std::tie(a, b) = std::pair{b, a + b};
    }
    std::mt19937_64 rng(42);
    double law = 0;
    for (int k = 0; k < 100; ++k) {
        MultiIndex s = random_word(rng);
        auto pre = predecessors(s);
        MultiIndex t = pre[std::uniform_int_distribution<size_t>(0, pre.size() - 1)(rng)];
        MultiIndex q = word_subtract(s, t);
        for (int j = 0; j < 20; ++j) {
            double x = -1 + 0.1 * j;
            law = std::max(law, std::abs(apply_affine(q, apply_affine(t, x)) - apply_affine(s, x)));
        }
    }
    auto a5 = arc_points(p, 5, 513, 1, 6, false), a6 = arc_points(p, 6, 513, 1, 6, false);
    double arc = 0;
    for (size_t i = 0; i < a5.size(); ++i) arc = std::max(arc, std::abs(a5[i].z - a6[i].z));
    report(7, gap < 1e-12 && fib && law < 1e-12 && arc < 1e-2,
           fmt("coverage defect=%.2e fibonacci=%d composition law=%.2e arc depth 5 vs 6=%.2e", gap, int(fib), law,
               arc));
}

void criterion8() {
    SolveResult r = solve(120, 160);
    const FactorPair& p = r.pair;
    Grid2D g = grid_for(p);
    Pair2D S = embed(p, g);
    Pair2D out = rg_2d(S, 2, g);
    double fixed = l1(reduce(out) - p) + distance_to_embedding(out);
    double commute = l1(reduce(out) - rg(rg(p).pair).pair);
    Projection2D pr;
    project_ac_2d(S, &pr);
    double pi2 = std::max({std::abs(pr.a), std::abs(pr.b), std::abs(pr.c)});
    Mat L = build_L0(p);
    auto sp = spectrum(L);
    double mu = sp.unstable.empty() ? 0 : std::abs(sp.unstable[0]);
    Vec v = inverse_iteration(L, mu, Vec::Ones(L.rows()), 6);
    auto sc = spectral_coincidence(p, unpack(v, p.n1(), p.n2()), 2);
    double rel = std::abs(sc.unstable_growth / (mu * mu) - 1);
    report(8, fixed < 1e-7 && commute < 1e-8 && pi2 < 1e-10 && rel < 1e-3 && sc.y_ratio < 1,
           fmt("(120/160, n=2) fixed=%.2e embedding commutes=%.2e pi2=%.2e growth relative=%.2e y ratio=%.2e", fixed,
               commute, pi2, rel, sc.y_ratio));
}

int run(const std::string& args) {
    std::string cmd = "\"" SIEGEL_CLI "\" " + args + " >/dev/null 2>&1";
    int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void criterion9() {
    fs::path root = fs::temp_directory_path() / "siegel_acceptance";
    fs::remove_all(root);
    bool ran = true;
    for (int w : {1, 8}) {
        std::string o = " --seed 0 --workers " + std::to_string(w) + " --out " + (root / std::to_string(w)).string();
        for (const char* c : {"fixpoint", "spectrum", "certify", "partition --level 3", "arc --depth 5"})
            ran = ran && run(std::string(c) + o) == 0;
        run("cones" + o);
    }
    int files = 0, differ = 0;
    if (ran)
        for (auto& e : fs::recursive_directory_iterator(root / "1")) {
            if (!e.is_regular_file()) continue;
            ++files;
            differ += slurp(e.path()) != slurp(root / "8" / fs::relative(e.path(), root / "1"));
        }
    report(9, ran && files > 0 && differ == 0, fmt("files compared=%d differing=%d", files, differ));
    fs::remove_all(root);
}

}  // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult r = solve(40, 50);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Mat L = build_L0(r.pair);
    auto guard = [](int k, auto&& f) {
        try {
            f();
        } catch (const std::exception& e) {
            report(k, false, std::string("exception: ") + e.what());
        }
    };
    guard(1, [&] { criterion1(r, secs); });
    guard(2, [&] { criterion2(); });
    guard(3, [&] { criterion3(r.pair); });
    guard(4, [&] { criterion4(r.pair, L); });
    guard(5, [&] { criterion5(r.pair, L); });
    guard(6, [&] { criterion6(); });
    guard(7, [&] { criterion7(r.pair); });
    guard(8, [&] { criterion8(); });
    guard(9, [&] { criterion9(); });
    std::printf("%d of 9 criteria failed\n", failures);
    return failures ? 1 : 0;
}
