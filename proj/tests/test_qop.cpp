#include "support.hpp"

#include <gtest/gtest.h>

using namespace auxq;
using namespace auxq::testing;

namespace {

bool flips_multiple(long a, long b, int M, int Nprime) {
    int d = (twice_sz(a, M) - twice_sz(b, M)) / 2;
    return d % Nprime == 0;
}

}  // namespace

TEST(BuildQ, MatchesBruteForceChain) {
    Draw d(71);
    for (int N : {3, 4, 5}) {
        auto c = make_root_context(N, 1);
        SpecZPoint p = central_point(d.generic(c));
        const cplx z = d.spectral();
        QMatrix Q = build_Q(p, z, 4, default_convention(c));
        LOperator L = build_L_params(*p.chart, z / p.mu, default_variant(c), c.q * z / p.mu, 1.0);
        EXPECT_LT(rel_diff(Q.op.matrix, brute_chain(l_blocks(L), 4)), 1e-12);
    }
}

TEST(BuildQ, AllUpElementM3) {
    Draw d(72);
    auto c = make_root_context(3, 1);
    SpecZPoint p = central_point(d.cyclic(c));
    const cplx z = d.spectral();
    QMatrix Q = build_Q_params(*p.chart, p, z, 3, Convention::phodd, Gradation::homogeneous, 0.0, golden::m3_rho_scale());
    const cplx w = z / p.mu;
    EXPECT_LT(rel_diff(Q.op.matrix(0, 0), w * w * w * p.zc * p.zc - p.zc), 1e-12);
}

TEST(BuildQ, SpinFlipStructure) {
    Draw d(73);
    auto c = make_root_context(3, 1);
    const int M = 5;
    Mat Q = build_Q(central_point(d.cyclic(c)), d.spectral(), M, Convention::phodd).op.matrix;
    double leak = 0;
    for (long a = 0; a < Q.rows(); ++a)
        for (long b = 0; b < Q.cols(); ++b)
            if (!flips_multiple(a, b, M, c.Nprime)) leak = std::max(leak, std::abs(Q(a, b)));
    EXPECT_LT(leak, 1e-14 * Q.norm());
    // cyclic points do flip N' spins
    EXPECT_GT(std::abs(Q(0, (1L << M) - 1 - 3)), 1e-6 * Q.norm());

    Mat Qn = build_Q(central_point(d.nilpotent(c)), d.spectral(), M, Convention::phodd).op.matrix;
    Mat Sz = symmetry_ops(M).Sz.matrix;
    EXPECT_LT((Qn * Sz - Sz * Qn).norm(), 1e-13 * Qn.norm());
}

TEST(BuildQ, Errors) {
    auto c4 = make_root_context(4, 1);
    SpecZPoint p;
    p.ctx = c4;
    p.x = 0.3;
    p.y = 0.2;
    p.zc = 1.4;
    p.mu = 0.8;
    p.chart = RepParams{0.5, 0.2, 1.1, c4};
    try {
        build_Q(p, 0.5, 3, Convention::phiev);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "EvenCyclic");
    }
    auto c3 = make_root_context(3, 1);
    SpecZPoint one = central_point(RepParams{0.0, 0.0, 2.0, c3});
    one.mu = 1.0;
    EXPECT_THROW(build_Q(one, 0.5, 3, Convention::phodd), Error);
}

TEST(BuildQ, GaugeInvariance) {
    Draw d(74);
    auto c = make_root_context(5, 1);
    RepParams rp = d.cyclic(c);
    CyclicRep r = build_cyclic_rep(rp);
    Mat P(5, 5);
    for (long i = 0; i < 5; ++i)
        for (long j = 0; j < 5; ++j) P(i, j) = d.normal() + (i == j ? cplx(2.0) : cplx(0.0));
    Mat Pi = P.inverse();
    const cplx w = d.spectral();
    LOperator a = build_L_from(r.E, r.F, r.K, c, w, Variant::odd, c.q * w, 1.0);
    LOperator b = build_L_from(P * r.E * Pi, P * r.F * Pi, P * r.K * Pi, c, w, Variant::odd, c.q * w, 1.0);
    EXPECT_LT(rel_diff(chain_trace(l_blocks(a), 5), chain_trace(l_blocks(b), 5)), 1e-9);
}

TEST(BuildQ, TranslationInvariant) {
    Draw d(75);
    auto c = make_root_context(3, 1);
    Mat Q = build_Q(central_point(d.cyclic(c)), d.spectral(), 5, Convention::phodd).op.matrix;
    Mat P = translation(5);
    EXPECT_LT((Q * P - P * Q).norm(), 1e-13 * Q.norm());
}

TEST(TQ, OddCyclic) {
    Draw d(76);
    auto c = make_root_context(3, 1);
    double worst = 0;
    for (int M = 3; M <= 6; ++M)
        for (int i = 0; i < 10; ++i) {
            SpecZPoint p = central_point(d.cyclic(c));
            for (int j = 0; j < 5; ++j) worst = std::max(worst, tq_residual(p, d.spectral(), M, Convention::phodd));
        }
    EXPECT_LT(worst, 1e-8);
}

TEST(TQ, OtherOrdersAndConventions) {
    Draw d(77);
    for (int N : {4, 5, 6, 7}) {
        auto c = make_root_context(N, 1);
        for (int M : {3, 4}) {
            SpecZPoint p = central_point(d.generic(c));
            EXPECT_LT(tq_residual(p, d.spectral(), M, default_convention(c)), 1e-8) << N << " " << M;
            EXPECT_LT(tq_residual(p, d.spectral(), M, Convention::phab), 1e-8) << N << " " << M;
        }
    }
}

TEST(TQ, ScalarIdentityForFirstEigenvalue) {
    Draw d(78);
    auto c = make_root_context(3, 1);
    for (int i = 0; i < 10; ++i) {
        auto pr = golden::m4_tqex1(d.spectral(), c.q, d.annulus(0.5, 1.5));
        EXPECT_LT(rel_diff(pr.first, pr.second), 1e-10);
    }
}

TEST(FiberSum, BaxterEquationAllS) {
    Draw d(79);
    for (int N : {3, 4, 5}) {
        auto c = make_root_context(N, 1);
        SpecZPoint p = central_point(d.generic(c));
        for (long s = 0; s < N; ++s) EXPECT_LT(fiber_sum_residual(p, s, d.spectral(), 4, default_convention(c)), 1e-8);
    }
    auto c = make_root_context(3, 1);
    FiberSum f = fiber_sum_Q(central_point(d.cyclic(c)), 0, 0.4, 4, Convention::phodd);
    EXPECT_EQ(f.factor1, cplx(1.0));
    EXPECT_EQ(f.factor2, cplx(1.0));
}

TEST(FiberSum, M4ZeroSectorEigenvalue) {
    Draw d(80);
    auto c = make_root_context(3, 1);
    SpecZPoint p = central_point(d.cyclic(c));
    const cplx z = d.spectral();
    Mat F = fiber_sum_Q(p, 0, z, 4, Convention::phodd).Q.op.matrix;
    auto idx = sector_indices(4, 0);
    auto ev = eig_dense(restrict_to(F, idx)).eigenvalues;
    const cplx want = -9.0 * p.zc * p.zc * c.q * c.q * (z * z - c.q);
    EXPECT_LT(nearest(want, ev), 1e-9);
}

TEST(FiberSum, M3HalfSectorVanishes) {
    Draw d(81);
    auto c = make_root_context(3, 1);
    SpecZPoint p = central_point(d.cyclic(c));
    FiberSum f = fiber_sum_Q(p, 0, d.spectral(), 3, Convention::phodd);
    auto idx = sector_indices(3, 1);
    Mat blk = restrict_to(f.Q.op.matrix, idx);
    EXPECT_LT(blk.norm(), 1e-11 * f.Q.scale);
}

TEST(Baxter, Elements) {
    auto c = make_root_context(3, 1);
    const cplx z(0.6, 0.3);
    Mat Q = baxter_Q(z, 4, c, false).matrix;
    const long dd = state("dduu");
    EXPECT_LT(std::abs(Q(dd, dd) - z * c.q), 1e-14);
    EXPECT_LT(std::abs(Q(state("udud"), state("dudu")) * z * c.q - 1.0), 1e-13);
    auto ev = eig_dense(restrict_to(baxter_Q(z, 4, c).matrix, sector_indices(4, 0))).eigenvalues;
    EXPECT_LT(nearest(z * z * c.q * c.q - 1.0, ev), 1e-12);
    try {
        baxter_Q(z, 3, c);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "OddChain");
    }
}

TEST(Baxter, FunctionalEquation) {
    Draw d(82);
    for (int N : {3, 5}) {
        auto c = make_root_context(N, 1);
        for (int M : {4, 6}) EXPECT_LT(baxter_residual(d.spectral(), M, c), 1e-8);
    }
    // the bare a^M, b^M coefficients do not work
    EXPECT_GT(baxter_residual_bare(cplx(0.5, 0.4), 4, make_root_context(3, 1)), 1e-3);
}

TEST(Laws, CyclicOdd) {
    Draw d(83);
    for (int N : {3, 5}) {
        auto c = make_root_context(N, 1);
        for (int M : {3, 4}) {
            SpecZPoint p = central_point(d.cyclic(c));
            const cplx z = d.spectral();
            for (Law law : {Law::QSz, Law::SQ, Law::QR, Law::Qp, Law::transpose})
                EXPECT_LT(transformation_check(law, p, z, M), 1e-9) << N << " " << M << " law " << int(law);
        }
    }
}

TEST(Laws, Nilpotent) {
    Draw d(84);
    for (int N : {3, 4, 5}) {
        auto c = make_root_context(N, 1);
        SpecZPoint p = central_point(d.nilpotent(c));
        EXPECT_LT(transformation_check(Law::QR0, p, d.spectral(), 4), 1e-9);
        EXPECT_LT(transformation_check(Law::Qp, p, d.spectral(), 4), 1e-9);
        if (c.odd) EXPECT_LT(transformation_check(Law::SQ, p, d.spectral(), 4), 1e-12);
    }
    auto c = make_root_context(3, 1);
    try {
        transformation_check(Law::QR0, central_point(d.cyclic(c)), 0.5, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "LawPreconditionViolated");
    }
}

TEST(Laws, SzConjugationMovesPoint) {
    Draw d(85);
    auto c = make_root_context(3, 1);
    RepParams rp = d.cyclic(c);
    const cplx t(0.2, 0.1);
    RepParams r = rp;
    r.xi *= std::exp(-t * 3.0);
    r.zeta *= std::exp(t * 3.0);
    SpecZPoint a = central_point(rp), b = point_with_mu(r, a.mu);
    EXPECT_LT(std::abs(b.x - std::exp(-t * 3.0) * a.x), 1e-12 * std::abs(a.x));
    EXPECT_LT(std::abs(b.y - std::exp(t * 3.0) * a.y), 1e-12 * std::abs(a.y));
    EXPECT_LT(std::abs(b.c - a.c), 1e-12);
}

TEST(Laws, TqsCorrectedForm) {
    Draw d(86);
    auto c = make_root_context(3, 1);
    for (int M : {2, 4}) {
        TqsReport r = tqs_check(central_point(d.cyclic(c)), d.spectral(), M);
        EXPECT_LT(r.corrected, 1e-9);
        EXPECT_GT(r.literal, 1e-3);
    }
}

TEST(Commute, FiberMatesAndT) {
    Draw d(87);
    auto c = make_root_context(3, 1);
    SpecZPoint p = central_point(d.cyclic(c));
    const cplx z = d.spectral();
    auto f = fiber(p);
    for (size_t i = 0; i < f.size(); ++i)
        for (size_t j = i + 1; j < f.size(); ++j) {
            CommuteResult r = commute_predicate(f[i], f[j], z, z, 3);
            EXPECT_TRUE(r.predicate);
            EXPECT_LT(r.residual, 1e-9);
        }
    QMatrix Q = build_Q(p, z, 4, Convention::phodd);
    for (int i = 0; i < 3; ++i) EXPECT_LT(qt_commutator(Q, d.spectral()), 1e-9);
}

TEST(Commute, UnrelatedPoints) {
    Draw d(88);
    auto c = make_root_context(3, 1);
    SpecZPoint a = central_point(d.cyclic(c)), b = central_point(d.cyclic(c));
    CommuteResult r = commute_predicate(a, b, d.spectral(), d.spectral(), 3);
    EXPECT_FALSE(r.predicate);
    EXPECT_GT(r.residual, 1e-6);
}

TEST(Commute, VanishingOperator) {
    Draw d(89);
    auto c = make_root_context(5, 1);
    QMatrix Q = build_Q(central_point(d.cyclic(c)), d.spectral(), 3, Convention::phodd);
    EXPECT_TRUE(Q.vanishing());
    EXPECT_EQ(qt_commutator(Q, 0.5), 0.0);
    EXPECT_EQ(tq_residual(Q.p, Q.z_spec, 3, Convention::phodd), 0.0);
}
