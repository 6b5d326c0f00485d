#include "support.hpp"

#include <gtest/gtest.h>

using namespace auxq;
using namespace auxq::testing;

namespace {

// Independent matrix construction straight from the action on v_n.
void basis_action(const RepParams& p, Mat& E, Mat& F, Mat& K) {
    const int n = p.ctx.Nprime;
    const cplx q = std::exp(cplx(0, 2.0 * kPi * p.ctx.k / p.ctx.N));
    auto br = [&](int m) { return (std::pow(q, double(m)) - std::pow(q, -double(m))) / (q - 1.0 / q); };
    auto lb = [&](int m) { return (p.lambda * std::pow(q, -double(m)) - std::pow(q, double(m)) / p.lambda) / (q - 1.0 / q); };
    E = Mat::Zero(n, n);
    F = Mat::Zero(n, n);
    K = Mat::Zero(n, n);
    for (int m = 0; m < n; ++m) {
        K(m, m) = p.lambda * std::pow(q, -2.0 * m);
        F((m + 1) % n, m) += (m + 1 < n) ? cplx(1.0) : p.zeta;
        if (m > 0) E(m - 1, m) += lb(m - 1) * br(m) + p.xi * p.zeta;
        else E(n - 1, 0) += p.xi;
    }
}

double qg_all(const CyclicRep& r, const RootContext& c) {
    Mat Ki = r.K.inverse();
    double s = std::max({1.0, r.E.norm(), r.F.norm(), r.K.norm()});
    double a = (r.K * r.E * Ki - c.qpow(2) * r.E).norm();
    double b = (r.K * r.F * Ki - c.qpow(-2) * r.F).norm();
    double d = (r.E * r.F - r.F * r.E - (r.K - Ki) / c.qmq()).norm();
    return std::max({a, b, d}) / s;
}

bool is_scalar(const Mat& X, cplx s, double tol) {
    return (X - s * Mat::Identity(X.rows(), X.cols())).norm() <= tol * std::max(1.0, std::abs(s));
}

}  // namespace

TEST(CyclicRep, MatchesBasisAction) {
    Draw d(21);
    for (int N : {3, 5, 7}) {
        auto c = make_root_context(N, 1);
        for (int t = 0; t < 10; ++t) {
            RepParams p = d.cyclic(c);
            CyclicRep r = build_cyclic_rep(p);
            Mat E, F, K;
            basis_action(p, E, F, K);
            EXPECT_LT(rel_diff(r.E, E), 1e-13);
            EXPECT_LT(rel_diff(r.F, F), 1e-13);
            EXPECT_LT(rel_diff(r.K, K), 1e-13);
        }
    }
}

TEST(CyclicRep, QuantumGroupRelations) {
    Draw d(22);
    for (int N : {3, 5, 7}) {
        auto c = make_root_context(N, 1);
        for (int t = 0; t < 50; ++t) EXPECT_LT(qg_all(build_cyclic_rep(d.cyclic(c)), c), 1e-10);
    }
    for (int N : {4, 6, 8}) {
        auto c = make_root_context(N, 1);
        for (int t = 0; t < 10; ++t) EXPECT_LT(qg_all(build_cyclic_rep(d.nilpotent(c)), c), 1e-10);
    }
}

TEST(CyclicRep, FirstEntryN3) {
    auto c = make_root_context(3, 1);
    RepParams p{cplx(0.4, 0.2), cplx(-0.3, 0.5), cplx(1.2, 0.3), c};
    CyclicRep r = build_cyclic_rep(p);
    cplx want = p.xi * p.zeta + (p.lambda - 1.0 / p.lambda) / c.qmq();
    EXPECT_LT(std::abs(r.E(0, 1) - want), 1e-14);
}

TEST(CyclicRep, NilpotentCorners) {
    auto c = make_root_context(5, 2);
    CyclicRep r = build_cyclic_rep(RepParams{0.0, 0.0, cplx(0.8, 0.4), c});
    const long n = r.E.rows();
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            if (j != i + 1) EXPECT_EQ(r.E(i, j), cplx(0.0));
            if (i != j + 1) EXPECT_EQ(r.F(i, j), cplx(0.0));
        }
}

TEST(CyclicRep, EvenCyclicRejected) {
    auto c = make_root_context(4, 1);
    try {
        build_cyclic_rep(RepParams{1.0, 0.0, 1.3, c});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "EvenParityCyclic");
    }
}

TEST(CentralValues, NilpotentPlugIn) {
    auto c = make_root_context(3, 1);
    SpecZPoint s = central_values(build_cyclic_rep(RepParams{0.0, 0.0, 2.0, c}));
    EXPECT_EQ(s.x, cplx(0.0));
    EXPECT_EQ(s.y, cplx(0.0));
    EXPECT_LT(std::abs(s.zc - 8.0), 1e-13);
    EXPECT_LT(std::abs(s.c - (2.0 * c.q + 0.5 / c.q)), 1e-14);
}

TEST(CentralValues, MatrixPowers) {
    Draw d(23);
    for (int N : {3, 5, 7}) {
        auto c = make_root_context(N, 1);
        for (int t = 0; t < 10; ++t) {
            CyclicRep r = build_cyclic_rep(d.cyclic(c));
            SpecZPoint s = central_values(r);
            EXPECT_TRUE(is_scalar(mpow(c.qmq() * r.E, c.Nprime), s.x, 1e-9));
            EXPECT_TRUE(is_scalar(mpow(c.qmq() * r.F, c.Nprime), s.y, 1e-9));
            EXPECT_TRUE(is_scalar(mpow(r.K, c.Nprime), s.zc, 1e-9));
            // Casimir as a matrix
            Mat C = c.q * r.K + (c.q * r.K).inverse() + c.qmq() * c.qmq() * r.F * r.E;
            EXPECT_TRUE(is_scalar(C, s.c, 1e-9));
            EXPECT_LT(sz_residual(s), 1e-9);
            EXPECT_LT(std::abs(s.mu + 1.0 / s.mu - s.c), 1e-9 * std::max(1.0, std::abs(s.c)));
        }
    }
}

TEST(CentralValues, SemiCyclic) {
    auto c = make_root_context(3, 1);
    SpecZPoint s = central_point(RepParams{0.0, cplx(0.6, 0.1), 1.3, c});
    EXPECT_EQ(s.x, cplx(0.0));
    EXPECT_GT(std::abs(s.y), 0.1);
}

TEST(MuBranch, Nilpotent) {
    auto c = make_root_context(5, 1);
    RepParams p{0.0, 0.0, cplx(0.9, 0.7), c};
    EXPECT_LT(std::abs(mu_branch(casimir_of(p), p) - 1.0 / (p.lambda * c.q)), 1e-15);
    RepParams bad{0.0, 0.0, 1.0 / c.q, c};
    try {
        mu_branch(casimir_of(bad), bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "DegenerateMu");
    }
}

TEST(MuBranch, SmallCouplingPicksNearRoot) {
    auto c = make_root_context(3, 1);
    RepParams p{cplx(0.01, 0.0), cplx(0.02, 0.01), cplx(1.3, 0.2), c};
    cplx cv = casimir_of(p);
    cplx dd = std::sqrt(cv * cv - 4.0);
    cplx r1 = (cv + dd) / 2.0, r2 = (cv - dd) / 2.0;
    cplx target = 1.0 / (p.lambda * c.q);
    cplx want = std::abs(r1 - target) < std::abs(r2 - target) ? r1 : r2;
    EXPECT_LT(std::abs(mu_branch(cv, p) - want), 1e-12);
}

TEST(Discriminant, Examples) {
    auto c = make_root_context(3, 1);
    SpecZPoint a;
    a.ctx = c;
    a.zc = 1.0;
    a.c = c.q + 1.0 / c.q;
    EXPECT_TRUE(in_discriminant(a));
    a.c = -(c.q + 1.0 / c.q);
    EXPECT_TRUE(in_discriminant(a));
    Draw d(24);
    EXPECT_FALSE(in_discriminant(central_point(d.cyclic(c))));
    try {
        fiber(a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "DiscriminantPoint");
    }
}

TEST(Fiber, PointsAndCasimirs) {
    Draw d(25);
    for (int N : {3, 4, 5, 6}) {
        auto c = make_root_context(N, 1);
        SpecZPoint p = central_point(d.generic(c));
        auto f = fiber(p);
        ASSERT_EQ(int(f.size()), c.Nprime);
        EXPECT_EQ(f[0].c, p.c);
        const long step = c.odd ? 1 : 2;
        for (int l = 0; l < c.Nprime; ++l) {
            cplx mu = p.mu * c.qpow(step * l);
            EXPECT_LT(sz_residual(f[l]), 1e-9);
            EXPECT_LT(std::abs(f[l].c - (mu + 1.0 / mu)) / std::max(1.0, std::abs(mu)), 1e-9);
            EXPECT_LT(std::abs(big_F(f[l].c, c) - big_F(p.c, c)) / std::max(1.0, std::abs(big_F(p.c, c))), 1e-9);
            EXPECT_LT(std::abs(f[l].x - p.x), 1e-9 * std::max(1.0, std::abs(p.x)));
            EXPECT_LT(std::abs(f[l].zc - p.zc), 1e-9 * std::max(1.0, std::abs(p.zc)));
        }
    }
}

TEST(SpinReversal, Involution) {
    Draw d(26);
    auto c = make_root_context(5, 1);
    SpecZPoint p = central_point(d.cyclic(c));
    SpecZPoint r = spin_reversal_point(p);
    EXPECT_EQ(r.c, p.c);
    EXPECT_EQ(r.x, p.y);
    SpecZPoint rr = spin_reversal_point(r);
    EXPECT_LT(std::abs(rr.x - p.x) + std::abs(rr.y - p.y) + std::abs(rr.zc - p.zc) + std::abs(rr.mu - p.mu), 1e-12);
}

TEST(SpinReversal, NilpotentCoordinates) {
    auto c = make_root_context(3, 1);
    RepParams p{0.0, 0.0, cplx(1.1, -0.3), c};
    RepParams r = reversal_coordinates(p);
    EXPECT_EQ(r.xi, cplx(0.0));
    EXPECT_EQ(r.zeta, cplx(0.0));
    EXPECT_LT(std::abs(r.lambda - 1.0 / (p.lambda * c.q * c.q)), 1e-14);
}

TEST(SpinReversal, CoordinatesCommuteWithCentralValues) {
    Draw d(27);
    for (int N : {3, 5, 7}) {
        auto c = make_root_context(N, 1);
        for (int t = 0; t < 5; ++t) {
            RepParams p = d.cyclic(c);
            RepParams r = reversal_coordinates(p);
            EXPECT_LT(std::abs(r.zeta - eta_of(p)), 1e-12 * std::max(1.0, std::abs(r.zeta)));
            SpecZPoint via = point_with_mu(r, 1.0);
            SpecZPoint ref = spin_reversal_point(central_point(p));
            double sc = std::max({1.0, std::abs(ref.x), std::abs(ref.y), std::abs(ref.zc)});
            EXPECT_LT((std::abs(via.x - ref.x) + std::abs(via.y - ref.y) + std::abs(via.zc - ref.zc)) / sc, 1e-8);
            EXPECT_LT(std::abs(via.c - ref.c) / std::max(1.0, std::abs(ref.c)), 1e-8);
        }
    }
}

TEST(Evaluation, LoopRelations) {
    Draw d(28);
    for (int N : {3, 5}) {
        auto c = make_root_context(N, 1);
        CyclicRep r = build_cyclic_rep(d.cyclic(c));
        for (auto g : {Gradation::homogeneous, Gradation::principal}) {
            EvalRep ev = evaluation_rep(r, d.spectral(), g);
            EXPECT_LT(rel_diff(ev.gens.k[0], Mat(r.K.inverse())), 1e-14);
            EXPECT_LT(loop_relation_residual(ev.gens, c), 1e-9);
        }
    }
    auto c = make_root_context(3, 1);
    EXPECT_THROW(evaluation_rep(build_cyclic_rep(d.cyclic(c)), 0.0), Error);
}

TEST(Evaluation, TwoDimRep) {
    auto c = make_root_context(3, 1);
    const cplx z(0.7, 0.2);
    TwoDimRep t = two_dim_rep(z, c);
    EXPECT_LT(rel_diff(t.gens.e[0], Mat(z * sigma_minus())), 1e-15);
    EXPECT_LT(rel_diff(t.gens.e[1], sigma_plus()), 1e-15);
    EXPECT_LT(loop_relation_residual(t.gens, c), 1e-12);
}

TEST(Coproduct, KAndOpposite) {
    Draw d(29);
    auto c = make_root_context(3, 1);
    EvalRep A = evaluation_rep(build_cyclic_rep(d.cyclic(c)), d.spectral());
    TwoDimRep B = two_dim_rep(d.spectral(), c);
    EXPECT_LT(rel_diff(coproduct_action(Gen::k1, A.gens, B.gens), kron(A.gens.k[1], B.gens.k[1])), 1e-15);
    // Delta^op on A (x) B is the flip of Delta on B (x) A
    const long a = A.gens.k[0].rows(), b = 2;
    Mat P = Mat::Zero(a * b, a * b);
    for (long i = 0; i < a; ++i)
        for (long j = 0; j < b; ++j) P(i * b + j, j * a + i) = 1.0;
    for (Gen g : {Gen::e0, Gen::f0, Gen::e1, Gen::f1, Gen::k0}) {
        Mat op = coproduct_action(g, A.gens, B.gens, true);
        Mat flipped = P * coproduct_action(g, B.gens, A.gens) * P.transpose();
        EXPECT_LT(rel_diff(op, flipped), 1e-14);
    }
    // the tensor product is again a loop-algebra representation
    LoopGens T;
    for (int i = 0; i < 2; ++i) {
        Gen e = i ? Gen::e1 : Gen::e0, f = i ? Gen::f1 : Gen::f0, k = i ? Gen::k1 : Gen::k0;
        T.e[i] = coproduct_action(e, A.gens, B.gens);
        T.f[i] = coproduct_action(f, A.gens, B.gens);
        T.k[i] = coproduct_action(k, A.gens, B.gens);
    }
    EXPECT_LT(loop_relation_residual(T, c), 1e-9);
}

TEST(Coproduct, CentralPowers) {
    Draw d(30);
    auto c = make_root_context(3, 1);
    CyclicRep r1 = build_cyclic_rep(d.cyclic(c)), r2 = build_cyclic_rep(d.cyclic(c));
    EvalRep A = evaluation_rep(r1, 1.0), B = evaluation_rep(r2, 1.0);
    const int n = c.Nprime;
    Mat De = c.qmq() * coproduct_action(Gen::e1, A.gens, B.gens);
    Mat x1 = mpow(c.qmq() * r1.E, n), x2 = mpow(c.qmq() * r2.E, n), z1 = mpow(r1.K, n);
    Mat I1 = Mat::Identity(n, n), I2 = Mat::Identity(n, n);
    EXPECT_LT(rel_diff(mpow(De, n), Mat(kron(x1, I2) + kron(z1, x2))), 1e-9);
}

TEST(CoadjointFlow, Basics) {
    Draw d(31);
    auto c = make_root_context(3, 1);
    SpecZPoint p = central_point(d.cyclic(c));
    SpecZPoint z0 = coadjoint_flow(p, 'e', 0.0);
    EXPECT_LT(std::abs(z0.y - p.y) + std::abs(z0.zc - p.zc), 1e-15);
    SpecZPoint e = coadjoint_flow(p, 'e', cplx(0.3, -0.2));
    EXPECT_EQ(e.x, p.x);
    // group property
    for (char g : {'e', 'f'}) {
        cplx t1(0.2, 0.1), t2(-0.15, 0.3);
        SpecZPoint a = coadjoint_flow(coadjoint_flow(p, g, t1), g, t2), b = coadjoint_flow(p, g, t1 + t2);
        EXPECT_LT(std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.zc - b.zc), 1e-8);
    }
    EXPECT_THROW(coadjoint_flow(central_point(d.nilpotent(make_root_context(4, 1))), 'e', 0.1), Error);
}

TEST(CoadjointFlow, InvariantOverRandomOrbits) {
    Draw d(32);
    auto c = make_root_context(5, 1);
    for (int orbit = 0; orbit < 100; ++orbit) {
        SpecZPoint p = central_point(d.cyclic(c));
        const cplx inv = flow_invariant(p);
        SpecZPoint cur = p;
        for (int s = 0; s < 4; ++s) {
            const double scale = 1.0 + std::abs(cur.x) + std::abs(cur.y);
            cur = coadjoint_flow(cur, s % 2 ? 'f' : 'e', 0.2 * d.normal() / scale);
        }
        EXPECT_LT(std::abs(flow_invariant(cur) - inv) / std::max(1.0, std::abs(inv)), 1e-9);
    }
}

TEST(CoadjointFlow, SmallXLimit) {
    auto c = make_root_context(3, 1);
    SpecZPoint p;
    p.ctx = c;
    p.x = 0.0;
    p.y = cplx(0.5, 0.1);
    p.zc = cplx(1.3, 0.4);
    p.c = 7.0;
    const cplx t(0.25, 0.05);
    SpecZPoint r = coadjoint_flow(p, 'e', t);
    EXPECT_LT(std::abs(r.y - (p.y + t * (p.zc - 1.0 / p.zc))), 1e-14);
}
