#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

using namespace siegel;

namespace {

double max_coeff(const cvec& h) {
    double m = 0;
    for (auto x : h) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST(Renorm, FixedPointIsRenormalizable) {
    auto rep = check_renormalizable(fixtures::pair());
    EXPECT_TRUE(rep.ok());
    EXPECT_NEAR(rep.inc1.margin, 0.0310, 5e-4);
    EXPECT_NEAR(rep.inc2.margin, 0.0136, 5e-4);
    EXPECT_NEAR(rep.inc3.margin, 0.0348, 5e-4);
}

TEST(Renorm, LargeScalingBreaksFirstInclusion) {
    FactorPair p = fixtures::pair();
    p.phi.a[0] += evaluate(p.phi, 0.0);
    auto rep = check_renormalizable(p);
    EXPECT_FALSE(rep.inc1.ok);
    EXPECT_LT(rep.inc1.margin, 0);
}

TEST(Renorm, TinyScalingSatisfiesDomainInclusions) {
    FactorPair p = fixtures::pair();
    p.phi.a[0] -= evaluate(p.phi, 0.0) - 1e-3;
    auto rep = check_renormalizable(p);
    EXPECT_TRUE(rep.inc1.ok);
    EXPECT_TRUE(rep.inc2.ok);
}

TEST(Renorm, DegenerateScalingThrows) {
    FactorPair p = fixtures::pair();
    p.phi.a[0] -= evaluate(p.phi, 0.0);
    try {
        renormalize(p);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.kind, errc::degenerate_scaling);
    }
}

TEST(Renorm, RenormalizedPairMatchesPointwiseDefinition) {
    const FactorPair& p = fixtures::pair();
    FactorPair q = renormalize(p);
    cplx lam = scaling_factor(p);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int s = 0; s < 20; ++s) {
        cplx z = p.phi.dom.unscaled(cplx(u(rng), u(rng)));
        cplx w = std::conj(z) * lam * lam;
        cplx x = evaluate(p.psi, w);
        cplx ref = std::conj(evaluate(p.phi, x * x) / lam);
        EXPECT_LT(std::abs(evaluate(q.phi, z) - ref), 1e-11);
        cplx z2 = p.psi.dom.unscaled(cplx(u(rng), u(rng)));
        cplx ref2 = std::conj(evaluate(p.phi, std::conj(z2) * lam * lam) / lam);
        EXPECT_LT(std::abs(evaluate(q.psi, z2) - ref2), 1e-11);
    }
}

TEST(Renorm, NormalizationAfterRenormalization) {
    FactorPair q = renormalize(fixtures::pair());
    EXPECT_LT(std::abs(evaluate(q.psi, 0.0) - 1.0), 1e-14);
    EXPECT_EQ(std::abs(evaluate(rg(fixtures::pair()).pair.psi, 0.0) - 1.0), 0.0);
}

TEST(Renorm, FixedPointIsFixed) {
    const FactorPair& p = fixtures::pair();
    EXPECT_LT(l1(rg(p).pair - p), 1e-8);
}

TEST(Renorm, OutputIsAlmostCommuting) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int s = 0; s < 4; ++s) {
        FactorPair p = fixtures::pair();
        for (int k = 0; k < 6; ++k) p.phi.a[k] += 1e-3 * cplx(u(rng), u(rng));
        p = project(p).first;
        auto r = residuals(rg(p).pair);
        EXPECT_TRUE(r.almost_commuting()) << r.max_abs();
    }
}

TEST(Renorm, CommutationToHighOrderIsPreserved) {
    const FactorPair& p = fixtures::pair(200, 260);
    EXPECT_LT(max_coeff(higher_commutator_coeffs(p, 12)), 1e-8);
    EXPECT_LT(max_coeff(higher_commutator_coeffs(rg(p).pair, 12)), 1e-8);
}

TEST(Renorm, ScalingAtFixedPoint) {
    cplx lam = fixtures::fixed_point(200, 260).lambda;
    EXPECT_NEAR(std::abs(lam.real()), 0.2202659671719908, 1e-9);
    EXPECT_NEAR(std::abs(lam.imag()), 0.7084817147563718, 1e-9);
    EXPECT_NEAR(lam.real(), -0.2202659671719908, 1e-9);
}

// |eta'(|lambda|^2)| = 1/|lambda| at the fixed point
TEST(Renorm, DerivativeAtSquaredModulus) {
    const auto& r = fixtures::fixed_point(200, 260);
    double l2 = std::norm(r.lambda);
    EXPECT_NEAR(std::abs(r.pair.deta(l2)), 1 / std::sqrt(l2), 1e-12);
}

TEST(Renorm, IterationFromSeedContractsInitially) {
    FactorPair p = seed_pair(40, 50, 12);
    std::vector<double> d;
    for (int i = 0; i < 4; ++i) {
        FactorPair q = rg(p).pair;
        d.push_back(l1(q - p));
        p = q;
    }
    for (int i = 0; i < 3; ++i) EXPECT_LT(d[i + 1] / d[i], 0.7) << i;
}

TEST(Renorm, EvenLevelSeedsConverge) {
    double prev = INFINITY;
    for (int L = 10; L <= 16; L += 2) {
        double d = l1(seed_pair(40, 50, L) - seed_pair(40, 50, L + 2));
        EXPECT_LT(d, 0.5 * prev) << L;
        prev = d;
    }
    EXPECT_LT(prev, 0.03);
}

TEST(Renorm, SeedLevelValidated) {
    try {
        seed_pair(10, 10, 0);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.kind, errc::config);
    }
}
