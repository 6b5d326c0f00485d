#pragma once

#include "repz.hpp"
#include "sixvertex.hpp"

namespace auxq {

enum class Variant { odd, breve };
enum class Convention { phodd, phiev, phab };

struct LOperator {
    Mat A, B, C, D;
    cplx wArg = 1.0;
    Variant variant = Variant::odd;
    cplx rhoPlus = 1.0, rhoMinus = 1.0;
    SpecZPoint sourcePoint;
    int branchSign = 1;  // sign of the lambda^{1/2} branch relative to the principal one

    long dim() const { return A.rows(); }
};

inline Variant default_variant(const RootContext& c) { return c.odd ? Variant::odd : Variant::breve; }

inline Convention default_convention(const RootContext& c) { return c.odd ? Convention::phodd : Convention::phiev; }

inline void check_convention(Convention conv, const RootContext& c) {
    if (conv == Convention::phodd && !c.odd) throw Error("ConfigInvalid", "phodd needs odd N");
    if (conv == Convention::phiev && c.odd) throw Error("ConfigInvalid", "phiev needs even N");
}

// rho_+ / rho_- = q w; phab uses a tracked w^{1/2}
inline std::pair<cplx, cplx> rho_pair(Convention conv, cplx w, cplx w_half, const RootContext& c) {
    if (conv == Convention::phab) {
        cplx h = w_half == cplx(0.0) ? std::sqrt(w) : w_half;
        return {c.q * h, 1.0 / h};
    }
    return {c.q * w, 1.0};
}

// w'^{1/2} for w' = w q^{dir}
inline cplx shift_w_half(cplx w_half, int dir, const RootContext& c) {
    if (c.odd) return w_half * c.qpow(long(dir) * (1 - c.N) / 2);
    return w_half * c.qhalf(dir);
}

inline std::pair<cplx, cplx> phi_scalars(Convention conv, cplx z, const RootContext& c) {
    check_convention(conv, c);
    BoltzmannWeights w = weights(z, c);
    switch (conv) {
        case Convention::phodd: return {w.b * c.qpow((c.N - 1) / 2), w.a * c.qpow((1 - c.N) / 2)};
        case Convention::phiev: return {w.b * c.qhalf(-1), w.a * c.qhalf(1)};
        default: return {w.b, w.a};
    }
}

inline LOperator build_L_from(const Mat& E, const Mat& F, const Mat& K, const RootContext& c, cplx w,
                              Variant v, cplx rp, cplx rm, cplx lambda_half = 0.0) {
    LOperator L;
    L.wArg = w;
    L.variant = v;
    L.rhoPlus = rp;
    L.rhoMinus = rm;
    const cplx qq = c.qmq();
    if (v == Variant::odd) {
        if (!c.odd) throw Error("EvenCyclic", "odd variant needs odd N");
        Mat Kp = mpow(K, (c.N + 1) / 2), Km = mpow(K, (c.N - 1) / 2);
        L.A = rp * Kp - rm * Km;
        L.B = rp * qq * Kp * F;
        L.C = rm * qq * E * Km;
        L.D = rp * Km - rm * Kp;
    } else {
        const long n = K.rows();
        cplx h = lambda_half == cplx(0.0) ? std::sqrt(K(0, 0)) : lambda_half;
        if (std::abs(h * h - K(0, 0)) > 1e-10 * std::abs(K(0, 0)))
            throw Error("BranchDegenerate", "lambda^{1/2} does not square to lambda");
        L.branchSign = std::abs(h - std::sqrt(K(0, 0))) < 1e-12 * std::abs(h) ? 1 : -1;
        Mat t = Mat::Zero(n, n);
        for (long i = 0; i < n; ++i) t(i, i) = h * c.qpow(-i);
        Mat ti = t.inverse();
        L.A = rp * t - rm * ti;
        L.B = rp * qq * t * F;
        L.C = rm * qq * E * ti;
        L.D = rp * ti - rm * t;
    }
    return L;
}

inline LOperator build_L_params(const RepParams& p, cplx w, Variant v, cplx rp, cplx rm) {
    if (v == Variant::breve && !p.ctx.odd && !p.nilpotent())
        throw Error("EvenCyclic", "cyclic representation at even N");
    if (v == Variant::odd && !p.ctx.odd) throw Error("EvenCyclic", "odd variant needs odd N");
    CyclicRep r = build_cyclic_rep(p);
    return build_L_from(r.E, r.F, r.K, p.ctx, w, v, rp, rm, p.sqrt_lambda());
}

inline LOperator build_L(const SpecZPoint& p, cplx w, Variant v) {
    LOperator L = build_L_params(chart_for(p), w, v, p.ctx.q * w, 1.0);
    L.sourcePoint = p;
    return L;
}

inline Mat l_full(const LOperator& L) {
    Mat u = Mat::Zero(2, 2), d = Mat::Zero(2, 2);
    u(0, 0) = 1.0;
    d(1, 1) = 1.0;
    return kron(L.A, u) + kron(L.B, sigma_plus()) + kron(L.C, sigma_minus()) + kron(L.D, d);
}

inline SiteBlocks l_blocks(const LOperator& L) {
    SiteBlocks s;
    s.b[0][0] = L.A;
    s.b[0][1] = L.B;
    s.b[1][0] = L.C;
    s.b[1][1] = L.D;
    return s;
}

// L(w/z) (pi_w (x) pi_z^0) Delta(x) = Delta^op(x) L(w/z)
inline double verify_intertwining(const LOperator& L, const CyclicRep& rep, cplx w, cplx z) {
    EvalRep a = evaluation_rep(rep, w);
    TwoDimRep b = two_dim_rep(z, rep.params.ctx);
    Mat Lf = l_full(L);
    double r = 0;
    for (Gen g : {Gen::e0, Gen::f0, Gen::k0, Gen::e1, Gen::f1, Gen::k1}) {
        Mat lhs = Lf * coproduct_action(g, a.gens, b.gens, false);
        Mat rhs = coproduct_action(g, a.gens, b.gens, true) * Lf;
        double s = std::max(lhs.norm(), rhs.norm());
        r = std::max(r, s == 0 ? 0.0 : (lhs - rhs).norm() / s);
    }
    return r;
}

// Operator on V (x) C^2 (x) C^2 from site blocks acting on factors 1 and 3.
inline Mat embed13(const SiteBlocks& L) {
    const long d = L.dim();
    Mat out = Mat::Zero(4 * d, 4 * d);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j)
            for (int s2 = 0; s2 < 2; ++s2)
                for (int so = 0; so < 2; ++so)
                    for (int si = 0; si < 2; ++si) out(i * 4 + s2 * 2 + so, j * 4 + s2 * 2 + si) = L.b[so][si](i, j);
    return out;
}

inline double verify_ybe(const RepParams& p, cplx w, cplx z, Variant v) {
    const auto& c = p.ctx;
    LOperator L12 = build_L_params(p, w / z, v, c.q * w / z, 1.0);
    LOperator L13 = build_L_params(p, w, v, c.q * w, 1.0);
    const long d = L12.dim();
    Mat l12 = kron(l_full(L12), Mat::Identity(2, 2));
    Mat l13 = embed13(l_blocks(L13));
    Mat r23 = kron(Mat::Identity(d, d), r_matrix(z, c));
    return rel_diff(l12 * l13 * r23, r23 * l13 * l12);
}

// Standard YBE R12(z1/z2) R13(z1) R23(z2) = R23 R13 R12
inline double verify_ybe_r(cplx z1, cplx z2, const RootContext& c) {
    Mat I2 = Mat::Identity(2, 2);
    Mat r12 = kron(r_matrix(z1 / z2, c), I2);
    Mat r13 = embed13(r_blocks(r_matrix(z1, c)));
    Mat r23 = kron(I2, r_matrix(z2, c));
    return rel_diff(r12 * r13 * r23, r23 * r13 * r12);
}

struct RepTriple {
    Mat E, F, K;
};

inline RepTriple triple(const CyclicRep& r) { return {r.E, r.F, r.K}; }

// phi with phi X_A phi^{-1} = X_B for X in {E, F, K}
inline Mat find_gauge(const RepTriple& A, const RepTriple& B, double tol = 1e-9) {
    const long n = A.K.rows();
    if (B.K.rows() != n) throw Error("NotIsomorphic", "dimension mismatch");
    const Mat I = Mat::Identity(n, n);
    Mat sys(3 * n * n, n * n);
    const Mat* xa[3] = {&A.E, &A.F, &A.K};
    const Mat* xb[3] = {&B.E, &B.F, &B.K};
    double scale = 1.0;
    for (int t = 0; t < 3; ++t) {
        sys.block(t * n * n, 0, n * n, n * n) = kron(I, *xb[t]) - kron(xa[t]->transpose(), I);
        scale = std::max({scale, xa[t]->norm(), xb[t]->norm()});
    }
    Eigen::JacobiSVD<Mat> svd(sys, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv[n * n - 1] > tol * scale) throw Error("NotIsomorphic", "no intertwining solution");
    if (n * n > 1 && sv[n * n - 2] <= tol * scale) throw Error("NotIsomorphic", "solution space not one-dimensional");
    Vec v = svd.matrixV().col(n * n - 1);
    Mat phi(n, n);
    for (long j = 0; j < n; ++j)
        for (long i = 0; i < n; ++i) phi(i, j) = v[j * n + i];
    cplx norm = phi(0, 0);
    if (std::abs(norm) < 1e-8 * phi.norm()) {
        for (long k = 0; k < n * n; ++k)
            if (std::abs(v[k]) > 1e-8 * phi.norm()) {
                norm = v[k];
                break;
            }
    }
    phi /= norm;
    Eigen::FullPivLU<Mat> lu(phi);
    if (lu.rank() < n) throw Error("NotIsomorphic", "intertwiner is singular");
    return phi;
}

inline double spin_reversal_L_check(const SpecZPoint& p, cplx w) {
    if (!p.ctx.odd) throw Error("LawPreconditionViolated", "spin reversal law is checked for the odd variant");
    const RepParams cp = chart_for(p);
    const RepParams rp = reversal_coordinates(cp);
    CyclicRep rep = build_cyclic_rep(cp), rev = build_cyclic_rep(rp);
    RepTriple omega{rep.F, rep.E, rep.K.inverse()};
    Mat phi = find_gauge(triple(rev), omega);
    Mat phii = phi.inverse();
    LOperator L = build_L_params(cp, w, Variant::odd, p.ctx.q * w, 1.0);
    LOperator LR = build_L_params(rp, w, Variant::odd, p.ctx.q * w, 1.0);
    const cplx zc = ipow(cp.lambda, p.ctx.Nprime);
    double r = 0;
    r = std::max(r, rel_diff(L.D, zc * phi * LR.A * phii));
    r = std::max(r, rel_diff(L.C, zc / w * phi * LR.B * phii));
    r = std::max(r, rel_diff(L.B, zc * w * phi * LR.C * phii));
    r = std::max(r, rel_diff(L.A, zc * phi * LR.D * phii));
    return r;
}

// Principal form: the same law with no w-twist, y^2 = w.
inline double spin_reversal_L_check_principal(const SpecZPoint& p, cplx y) {
    const RepParams cp = chart_for(p);
    const RepParams rp = reversal_coordinates(cp);
    CyclicRep rep = build_cyclic_rep(cp), rev = build_cyclic_rep(rp);
    Mat phi = find_gauge(triple(rev), RepTriple{rep.F, rep.E, rep.K.inverse()});
    Mat phii = phi.inverse();
    const cplx w = y * y;
    LOperator L = build_L_params(cp, w, Variant::odd, p.ctx.q * w, 1.0);
    LOperator LR = build_L_params(rp, w, Variant::odd, p.ctx.q * w, 1.0);
    // principal blocks: B/y, C y
    const cplx zc = ipow(cp.lambda, p.ctx.Nprime);
    double r = 0;
    r = std::max(r, rel_diff(L.D, zc * phi * LR.A * phii));
    r = std::max(r, rel_diff(Mat(L.C * y), zc * phi * Mat(LR.B / y) * phii));
    r = std::max(r, rel_diff(Mat(L.B / y), zc * phi * Mat(LR.C * y) * phii));
    r = std::max(r, rel_diff(L.A, zc * phi * LR.D * phii));
    return r;
}

// Values of the loop-algebra central elements x_i, y_i, z_i on pi_w^p.
struct LoopCentral {
    std::array<cplx, 2> x, y, z;
};

inline LoopCentral loop_central(const SpecZPoint& p, cplx w) {
    const long np = p.ctx.Nprime;
    return {{ipow(w, np) * p.y, p.x}, {ipow(w, -np) * p.x, p.y}, {1.0 / p.zc, p.zc}};
}

inline LoopCentral loop_central_two_dim(const RootContext& c) {
    cplx z = c.qpow(c.Nprime);
    return {{0.0, 0.0}, {0.0, 0.0}, {z, z}};
}

inline bool crit_holds(const LoopCentral& a, const LoopCentral& b, double tol) {
    for (int i = 0; i < 2; ++i) {
        cplx l1 = a.x[i] + a.z[i] * b.x[i], r1 = b.x[i] + a.x[i] * b.z[i];
        cplx l2 = a.y[i] / b.z[i] + b.y[i], r2 = b.y[i] / a.z[i] + a.y[i];
        double s1 = std::max({1.0, std::abs(l1), std::abs(r1)});
        double s2 = std::max({1.0, std::abs(l2), std::abs(r2)});
        if (std::abs(l1 - r1) > tol * s1 || std::abs(l2 - r2) > tol * s2) return false;
    }
    return true;
}

inline bool existence_criteria(const SpecZPoint& pA, const SpecZPoint& pB, cplx wA, cplx wB, double tol = 1e-9) {
    return crit_holds(loop_central(pA, wA), loop_central(pB, wB), tol);
}

inline bool intertwiner_exists(const SpecZPoint& p, cplx w, double tol = 1e-9) {
    return crit_holds(loop_central(p, w), loop_central_two_dim(p.ctx), tol);
}

struct BsBridge {
    LOperator L;      // from the (e, f, t) representation
    LOperator Lcoef;  // from the d, f, g, h coefficients
    cplx gamma1, gamma2, gamma3;
    cplx x, y, zc;
    double entrywise = 0;
    Mat E, F, K;
};

inline BsBridge bs_bridge(cplx s0, cplx s1, cplx s2, cplx w, const RootContext& c) {
    if (!c.odd) throw Error("LawPreconditionViolated", "bs_bridge needs odd N");
    const int n = c.N;
    Mat Z = Mat::Zero(n, n), X = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        Z(i, i) = c.qpow(-i);
        X((i + 1) % n, i) = 1.0;
    }
    Mat Zi = Z.inverse(), Xi = X.inverse();
    const cplx qq = c.qmq();
    const cplx qh = c.qhalf(1);
    const cplx r12 = std::sqrt(s1 / s2);  // (s1/s2)^{1/2}
    Mat eb = (s1 * Zi - Z / s1) * Xi / (s0 * qq);
    Mat fb = s0 * (s2 * Z - Zi / s2) * X / qq;
    Mat t = Z / r12;
    Mat ti = t.inverse();
    const cplx wh = std::sqrt(w);
    const cplx rp = qh * wh, rm = 1.0 / (qh * wh);
    BsBridge out;
    LOperator& L = out.L;
    L.variant = Variant::breve;
    L.wArg = w;
    L.rhoPlus = rp;
    L.rhoMinus = rm;
    L.A = rp * t - rm * ti;
    L.B = rp * qq / qh * fb;
    L.C = rm * qq * qh * eb;
    L.D = rp * ti - rm * t;
    const cplx dp = qh / r12, dm = -r12 / qh;
    const cplx fp = -c.q * dm, fm = -dp / c.q;  // d_pm = -q^{pm1} f_mp
    const cplx gp = -s0 / s2, gm = s0 * s2;
    const cplx hp = s1 / s0, hm = -1.0 / (s0 * s1);
    LOperator& K2 = out.Lcoef;
    K2 = L;
    K2.A = wh * dp * Z + dm / wh * Zi;
    K2.B = wh * (gp * Zi + gm * Z) * X;
    K2.C = (hp * Zi + hm * Z) * Xi / wh;
    K2.D = wh * fp * Zi + fm / wh * Z;
    out.entrywise = std::max({rel_diff(L.A, K2.A), rel_diff(L.B, K2.B), rel_diff(L.C, K2.C), rel_diff(L.D, K2.D)});
    out.E = eb * t;
    out.F = ti * fb;
    out.K = t * t;
    cplx xv = mpow(Mat(qq * out.E), n)(0, 0);
    cplx yv = mpow(Mat(qq * out.F), n)(0, 0);
    cplx zv = mpow(out.K, n)(0, 0);
    out.x = xv;
    out.y = yv;
    out.zc = zv;
    out.gamma1 = (1.0 - 1.0 / zv) * (1.0 - zv) / (xv * yv);
    out.gamma2 = ipow(w, -n);
    out.gamma3 = -ipow(w, -n) / zv * xv / yv;
    return out;
}

// ---- exact sequence ---------------------------------------------------------

struct ExactSequenceData {
    Mat iota;  // 2N' x N', rows indexed by (aux n, spin)
    Mat tau;   // N' x 2N'
    RepParams targetParamsPrime, targetParamsDoublePrime;
    cplx alpha0 = 1.0, gamma0 = 1.0;
    cplx w = 1.0, wPrime = 1.0, wDoublePrime = 1.0;
};

inline ExactSequenceData inclusion_map(const SpecZPoint& p, cplx z_spec) {
    const RepParams cp = chart_for(p);
    const auto& c = p.ctx;
    const int n = c.Nprime;
    if (n < 2) throw Error("ConfigInvalid", "N' >= 2 required");
    ExactSequenceData d;
    d.w = z_spec / p.mu;
    d.wPrime = d.w * c.q;
    d.wDoublePrime = d.w / c.q;
    d.targetParamsPrime = prime_params(cp, p.mu);
    d.targetParamsDoublePrime = double_prime_params(cp, p.mu);
    d.iota = Mat::Zero(2 * n, n);
    for (int k = 0; k < n; ++k) {
        cplx alpha = (k == n - 1 ? cp.zeta : cplx(1.0)) * c.qpow(-k) * d.alpha0;
        cplx beta = (p.mu * c.q / cp.lambda * c.qpow(k) - c.qpow(-k)) / c.qmq() * d.alpha0;
        d.iota(((k + 1) % n) * 2 + 0, k) += alpha;
        d.iota(k * 2 + 1, k) += beta;
    }
    return d;
}

inline ExactSequenceData projection_map(const SpecZPoint& p, cplx z_spec) {
    ExactSequenceData d = inclusion_map(p, z_spec);
    const RepParams cp = chart_for(p);
    const RepParams& pp = d.targetParamsDoublePrime;
    const auto& c = p.ctx;
    const int n = c.Nprime;
    Mat Y = Mat::Zero(2 * n, n);
    cplx g = d.gamma0;
    for (int k = 0; k < n; ++k) {
        if (k > 0) {
            cplx num = lambda_bracket(pp.lambda, k - 1, c) * q_bracket(k, c) + pp.xi * pp.zeta;
            cplx den = lambda_bracket(cp.lambda, k - 1, c) * q_bracket(k, c) + cp.xi * cp.zeta;
            if (std::abs(den) < 1e-14) throw Error("PoleInParams", "gamma denominator vanishes");
            g *= num / den;
        }
        Y(k * 2 + 0, k) = g;
    }
    Mat basis(2 * n, 2 * n);
    basis << d.iota, Y;
    Eigen::FullPivLU<Mat> lu(basis);
    if (lu.rank() < 2 * n) throw Error("PoleInParams", "X and Y do not span the tensor product");
    Mat sel = Mat::Zero(n, 2 * n);
    sel.rightCols(n) = Mat::Identity(n, n);
    d.tau = sel * lu.inverse();
    return d;
}

struct ExactSequenceCheck {
    double residual1 = 0, residual2 = 0;
    cplx phi1 = 0.0, phi2 = 0.0;
    cplx phi1_expected = 0.0, phi2_expected = 0.0;
    double eta_prime = 0, eta_double_prime = 0;
    double exactness = 0;
};

// Block (s', s) of L_13 R_23 on V (x) C^2.
inline Mat lr_block(const LOperator& L, const Mat& R, int so, int si) {
    SiteBlocks lb = l_blocks(L), rb = r_blocks(R);
    return kron(lb.b[so][0], rb.b[0][si]) + kron(lb.b[so][1], rb.b[1][si]);
}

inline ExactSequenceCheck verify_exact_sequence(const SpecZPoint& p, cplx z_spec, Convention conv,
                                                cplx w_half = 0.0) {
    const auto& c = p.ctx;
    check_convention(conv, c);
    ExactSequenceData d = projection_map(p, z_spec);
    const RepParams cp = chart_for(p);
    const Variant v = default_variant(c);
    const cplx wh = w_half == cplx(0.0) ? std::sqrt(d.w) : w_half;
    auto rho = rho_pair(conv, d.w, wh, c);
    auto rho1 = rho_pair(conv, d.wPrime, shift_w_half(wh, 1, c), c);
    auto rho2 = rho_pair(conv, d.wDoublePrime, shift_w_half(wh, -1, c), c);
    LOperator L = build_L_params(cp, d.w, v, rho.first, rho.second);
    LOperator L1 = build_L_params(d.targetParamsPrime, d.wPrime, v, rho1.first, rho1.second);
    LOperator L2 = build_L_params(d.targetParamsDoublePrime, d.wDoublePrime, v, rho2.first, rho2.second);
    Mat R = r_matrix(z_spec, c);
    SiteBlocks b1 = l_blocks(L1), b2 = l_blocks(L2);
    ExactSequenceCheck out;
    cplx num1 = 0.0, num2 = 0.0;
    double den1 = 0, den2 = 0;
    for (int so = 0; so < 2; ++so)
        for (int si = 0; si < 2; ++si) {
            Mat lr = lr_block(L, R, so, si);
            Mat a1 = lr * d.iota, b1m = d.iota * b1.b[so][si];
            num1 += b1m.cwiseProduct(a1.conjugate()).sum();
            den1 += b1m.squaredNorm();
            Mat a2 = d.tau * lr, b2m = b2.b[so][si] * d.tau;
            num2 += b2m.cwiseProduct(a2.conjugate()).sum();
            den2 += b2m.squaredNorm();
        }
    out.phi1 = std::conj(num1) / den1;
    out.phi2 = std::conj(num2) / den2;
    double n1 = 0, n2 = 0, r1 = 0, r2 = 0;
    for (int so = 0; so < 2; ++so)
        for (int si = 0; si < 2; ++si) {
            Mat lr = lr_block(L, R, so, si);
            Mat a1 = lr * d.iota, a2 = d.tau * lr;
            r1 += (a1 - out.phi1 * d.iota * b1.b[so][si]).squaredNorm();
            n1 += a1.squaredNorm();
            r2 += (a2 - out.phi2 * b2.b[so][si] * d.tau).squaredNorm();
            n2 += a2.squaredNorm();
        }
    out.residual1 = std::sqrt(r1 / std::max(n1, 1e-300));
    out.residual2 = std::sqrt(r2 / std::max(n2, 1e-300));
    auto ph = phi_scalars(conv, z_spec, c);
    out.phi1_expected = ph.first;
    out.phi2_expected = ph.second;
    const cplx eta = eta_of(cp);
    out.eta_prime = rel_diff(eta_of(d.targetParamsPrime), eta);
    out.eta_double_prime = rel_diff(eta_of(d.targetParamsDoublePrime), eta);
    out.exactness = (d.tau * d.iota).norm();
    return out;
}

}  // namespace auxq
