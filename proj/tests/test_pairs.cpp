#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

using namespace siegel;

namespace {

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

// (a, b) by Newton on (r0, r2) with difference Jacobian, c fixed by the normalization
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
        std::array<cplx, 4> J{(fa[0] - f[0]) / h, (fb[0] - f[0]) / h, (fa[1] - f[1]) / h, (fb[1] - f[1]) / h};
        auto d = solve2(J, f);
        a -= d[0];
        b -= d[1];
        if (std::abs(d[0]) + std::abs(d[1]) < 1e-16) break;
    }
    return {a, b};
}

}  // namespace

TEST(Pairs, DerivedPairIsCriticalAtZero) {
    const FactorPair& p = fixtures::pair();
    EXPECT_LT(std::abs(p.deta(0.0)), 1e-14);
    EXPECT_LT(std::abs(p.dxi(0.0)), 1e-14);
}

TEST(Pairs, ResidualsVanishForSymmetricPair) {
    Disk D(0.1, 0.9);
    TaylorDisk f(D, cvec{0.5, 0.3, -0.2, 0.1});
    f.a[0] += 1.0 - evaluate(f, 0.0);
    auto r = residuals({f, f});
    EXPECT_EQ(r.r0, cplx(0));
    EXPECT_EQ(r.r2, cplx(0));
    EXPECT_LT(std::abs(r.rnorm), 1e-15);

    auto c = residuals({constant(U_default, 4, 1.0), constant(V_default, 4, 1.0)});
    EXPECT_EQ(c.r0, cplx(0));
    EXPECT_EQ(c.r2, cplx(0));
    EXPECT_EQ(c.rnorm, cplx(0));
    EXPECT_TRUE(c.almost_commuting());
}

TEST(Pairs, FixedPointResiduals) {
    auto r = residuals(fixtures::pair());
    EXPECT_LT(std::abs(r.r0), 1e-10);
    EXPECT_LT(std::abs(r.r2), 1e-10);
    EXPECT_LT(std::abs(r.rnorm), 1e-10);
}

TEST(Pairs, SymmetryResidualVanishes) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto r = residuals(perturbed(fixtures::pair(), 1e-2, s));
        EXPECT_LT(std::abs(r.r1), 1e-15);
    }
}

TEST(Pairs, CommutatorOfEqualMapsIsZero) {
    Disk D(0.2, 1.0);
    TaylorDisk f(D, cvec{0.4, -0.3, 0.25, 0.1, -0.05});
    for (auto x : higher_commutator_coeffs({f, f}, 12)) EXPECT_EQ(x, cplx(0));
}

TEST(Pairs, CommutatorLowOrdersOfAlmostCommutingPair) {
    FactorPair q = project(perturbed(fixtures::pair(), 1e-3, 3)).first;
    auto h = higher_commutator_coeffs(q, 4);
    for (int k = 0; k <= 2; ++k) EXPECT_LT(std::abs(h[k]), 1e-10) << k;
}

TEST(Pairs, CommutatorMatchesSampledCompositions) {
    const FactorPair& p = fixtures::pair();
    auto h = higher_commutator_coeffs(p, 8);
    // Cauchy coefficients of eta o xi - xi o eta on a small circle
    int M = 64;
    double rho = 0.2;
    for (int k = 0; k <= 8; ++k) {
        cplx s = 0;
        for (int j = 0; j < M; ++j) {
            cplx x = rho * std::polar(1.0, 2 * pi * j / M);
            s += (p.eta(p.xi(x)) - p.xi(p.eta(x))) * std::pow(x / rho, -k);
        }
        s /= double(M) * std::pow(rho, k);
        EXPECT_LT(std::abs(s - h[k]), 1e-8 * std::max(1.0, std::abs(h[k]))) << k;
    }
}

TEST(Pairs, ProjectionOfAlmostCommutingPairIsIdentity) {
    auto [q, pc] = project(fixtures::pair());
    EXPECT_LT(std::abs(pc.a), 1e-13);
    EXPECT_LT(std::abs(pc.b), 1e-13);
    EXPECT_LT(std::abs(pc.c), 1e-13);
}

TEST(Pairs, ProjectionNormalizationConstant) {
    FactorPair p = fixtures::pair();
    p.psi.a[0] += 0.9 - evaluate(p.psi, 0.0);
    auto pc = project(p).second;
    EXPECT_NEAR(pc.c.real(), 0.1, 1e-15);
    EXPECT_NEAR(pc.c.imag(), 0.0, 1e-15);
}

TEST(Pairs, ProjectionRestoresCommutation) {
    FactorPair p = fixtures::pair();
    p.phi.a = [&] {
        cvec a = p.phi.a;
        cvec z2 = zpow(p.phi.dom, 2, p.n1());
        for (int k = 0; k <= p.n1(); ++k) a[k] += 1e-4 * z2[k];
        return a;
    }();
    auto [q, pc] = project(p);
    EXPECT_LT(residuals(q).max_abs(), 1e-12);
    auto ab = brute_force_ab(p);
    EXPECT_LT(std::abs(ab[0] - pc.a), 1e-10);
    EXPECT_LT(std::abs(ab[1] - pc.b), 1e-10);
}

TEST(Pairs, ProjectionAgreesWithBruteForceOnRandomPerturbations) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        FactorPair p = perturbed(fixtures::pair(), 1e-3, 100 + s);
        auto [q, pc] = project(p);
        EXPECT_LT(residuals(q).max_abs(), 1e-12);
        auto ab = brute_force_ab(p);
        EXPECT_LT(std::abs(ab[0] - pc.a), 1e-10);
        EXPECT_LT(std::abs(ab[1] - pc.b), 1e-10);
    }
}

TEST(Pairs, ProjectionIsIdempotent) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        FactorPair q = project(perturbed(fixtures::pair(), 1e-2, s)).first;
        auto pc = project(q).second;
        EXPECT_LT(std::abs(pc.a), 1e-12);
        EXPECT_LT(std::abs(pc.b), 1e-12);
        EXPECT_LT(std::abs(pc.c), 1e-12);
    }
}

TEST(Pairs, DeterminantIdentity) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto pc = project(perturbed(fixtures::pair(), 1e-2, s)).second;
        EXPECT_LT(std::abs(pc.det - pc.det_closed) / std::abs(pc.det_closed), 1e-12);
    }
}

TEST(Pairs, ResidualIsAffineInCorrection) {
    FactorPair p = perturbed(fixtures::pair(), 1e-3, 9);
    auto s = projection_system(p);
    auto r0 = [&](double t) { return residuals(apply_correction(p, 0.3 * t, -0.2 * t, s.c)).r0; };
    cplx a = r0(-1), m = r0(0.5), b = r0(2);
    EXPECT_LT(std::abs(m - (a + 0.5 * (b - a))), 1e-12);
    cplx slope_a = residuals(apply_correction(p, 1e-3, 0, s.c)).r0 - residuals(apply_correction(p, 0, 0, s.c)).r0;
    cplx slope_b = residuals(apply_correction(p, 0, 1e-3, s.c)).r0 - residuals(apply_correction(p, 0, 0, s.c)).r0;
    EXPECT_LT(std::abs(slope_a / 1e-3 - std::pow(s.p0, 4)), 1e-9);
    EXPECT_LT(std::abs(slope_b / 1e-3 - std::pow(s.p0, 6)), 1e-9);
}

TEST(Pairs, SingularProjectionCarriesDeterminant) {
    FactorPair p = zero_pair(6, 6);
    p.psi.a[0] = 1.0;
    p.phi.a[0] = 0.5;
    try {
        project(p);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.kind, errc::projection_singular);
        EXPECT_LT(e.value, 1e-8);
    }
}
