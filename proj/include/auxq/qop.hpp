#pragma once

#include "intertwiner.hpp"

namespace auxq {

struct QMatrix {
    ChainOperator op;
    SpecZPoint p;
    cplx z_spec = 1.0;
    Convention convention = Convention::phodd;
    Gradation gradation = Gradation::homogeneous;
    int branchSign = 1;
    double scale = 1.0;  // bound on |Q| built from the L blocks

    // identically zero up to rounding
    bool vanishing() const { return op.matrix.norm() < kVanish * scale; }
    static constexpr double kVanish = 1e-11;
};

inline double l_scale(const LOperator& L, int M) {
    double s = L.A.norm() + L.B.norm() + L.C.norm() + L.D.norm();
    return std::pow(s, M) * std::sqrt(std::ldexp(1.0, M));
}

// relative difference that reads two rounding-level operators as equal
inline double scaled_diff(const Mat& a, const Mat& b, double scale) {
    double s = std::max(a.norm(), b.norm());
    if (s < QMatrix::kVanish * scale) return 0.0;
    return (a - b).norm() / s;
}

// s^{-S^z} X s^{S^z}; entries between sectors of odd 2S^z difference must vanish
inline Mat sz_conj(const Mat& X, cplx s, int M) {
    Mat out = X;
    const long n = X.rows();
    for (long b = 0; b < n; ++b)
        for (long a = 0; a < n; ++a) {
            int d = twice_sz(a, M) - twice_sz(b, M);
            if (d % 2) continue;
            out(b, a) *= ipow(s, d / 2);
        }
    return out;
}

// e^{t S^z} X e^{-t S^z}
inline Mat sz_exp_conj(const Mat& X, cplx t, int M) {
    Mat out = X;
    const long n = X.rows();
    for (long b = 0; b < n; ++b)
        for (long a = 0; a < n; ++a) out(b, a) *= std::exp(t * 0.5 * double(twice_sz(b, M) - twice_sz(a, M)));
    return out;
}

inline QMatrix build_Q_params(const RepParams& cp, const SpecZPoint& p, cplx z_spec, int M, Convention conv,
                              Gradation g = Gradation::homogeneous, cplx w_half = 0.0, double rho_scale = 1.0) {
    const auto& c = cp.ctx;
    check_convention(conv, c);
    if (M < 1) throw Error("ConfigInvalid", "M must be positive");
    if (std::abs(p.mu - 1.0) < 1e-12) throw Error("DegenerateMu", "mu = 1");
    if (!c.odd && !cp.nilpotent()) throw Error("EvenCyclic", "cyclic representation at even N");
    const cplx w = z_spec / p.mu;
    const cplx wh = w_half == cplx(0.0) ? std::sqrt(w) : w_half;
    auto rho = rho_pair(conv, w, wh, c);
    LOperator L = build_L_params(cp, w, default_variant(c), rho_scale * rho.first, rho_scale * rho.second);
    if (g == Gradation::principal) {
        L.B = L.B / wh;
        L.C = L.C * wh;
    }
    QMatrix q;
    q.op = {M, chain_trace(l_blocks(L), M), "Q"};
    q.p = p;
    q.z_spec = z_spec;
    q.convention = conv;
    q.gradation = g;
    q.branchSign = L.branchSign;
    q.scale = l_scale(L, M);
    return q;
}

inline QMatrix build_Q(const SpecZPoint& p, cplx z_spec, int M, Convention conv,
                       Gradation g = Gradation::homogeneous, cplx w_half = 0.0) {
    return build_Q_params(chart_for(p), p, z_spec, M, conv, g, w_half);
}

inline double tq_residual(const SpecZPoint& p, cplx z, int M, Convention conv, cplx w_half = 0.0) {
    const auto& c = p.ctx;
    const cplx wh = w_half == cplx(0.0) ? std::sqrt(z / p.mu) : w_half;
    SpecZPoint p1 = prime_point(p), p2 = double_prime_point(p);
    QMatrix Q = build_Q(p, z, M, conv, Gradation::homogeneous, wh);
    Mat Q1 = build_Q(p1, z * c.qpow(2), M, conv, Gradation::homogeneous, shift_w_half(wh, 1, c)).op.matrix;
    Mat Q2 = build_Q(p2, z * c.qpow(-2), M, conv, Gradation::homogeneous, shift_w_half(wh, -1, c)).op.matrix;
    Mat T = transfer_matrix(z, M, c).matrix;
    auto ph = phi_scalars(conv, z, c);
    Mat lhs = Q.op.matrix * T;
    Mat rhs = ipow(ph.first, M) * Q1 + ipow(ph.second, M) * Q2;
    double sc = Q.scale * std::max({T.norm(), std::pow(std::abs(ph.first), M), std::pow(std::abs(ph.second), M)});
    return scaled_diff(lhs, rhs, sc);
}

struct FiberSum {
    QMatrix Q;
    cplx omega = 1.0;      // weight of point l is omega^l
    cplx factor1 = 1.0;    // multiplies phi_1^M in the functional equation
    cplx factor2 = 1.0;    // multiplies phi_2^M
    int points = 0;
    bool zero = false;
};

// One full turn of the fiber can flip the sign of L through the tracked square roots.
inline int fiber_cycle_sign(const RootContext& c, Convention conv, int M) {
    int sL = 1;
    if (!c.odd) sL = -sL;                                  // lambda^{1/2} q^{-N/2}
    if (conv == Convention::phab && !c.odd) sL = -sL;      // w^{1/2} q^{N/2}
    return (M % 2 && sL < 0) ? -1 : 1;
}

inline FiberSum fiber_sum_Q(const SpecZPoint& base, long s, cplx z, int M, Convention conv, cplx w_half = 0.0) {
    const auto& c = base.ctx;
    const int count = c.N;  // N odd: N' points; N even: two fibers, N points
    const int sign = fiber_cycle_sign(c, conv, M);
    FiberSum f;
    f.points = count;
    const double eps = sign < 0 ? 0.5 : 0.0;
    f.omega = expi(-2.0 * kPi * double(c.k) * (double(s) + eps) / double(c.N));
    f.factor1 = 1.0 / f.omega;
    f.factor2 = f.omega;
    cplx wh = w_half == cplx(0.0) ? std::sqrt(z / base.mu) : w_half;
    SpecZPoint cur = base;
    Mat acc;
    double sc = 0;
    for (int l = 0; l < count; ++l) {
        QMatrix qm = build_Q(cur, z, M, conv, Gradation::homogeneous, wh);
        const Mat& q = qm.op.matrix;
        if (l == 0) acc = Mat::Zero(q.rows(), q.cols());
        acc += ipow(f.omega, l) * q;
        sc = std::max(sc, qm.scale);
        cur = prime_point(cur);
        wh = shift_w_half(wh, -1, c);  // w_{l+1} = w_l / q
    }
    f.Q.op = {M, acc, "Qfiber"};
    f.Q.p = base;
    f.Q.z_spec = z;
    f.Q.convention = conv;
    f.Q.scale = sc * count;
    f.zero = f.Q.vanishing();
    return f;
}

inline double fiber_sum_residual(const SpecZPoint& base, long s, cplx z, int M, Convention conv) {
    const auto& c = base.ctx;
    const cplx wh = std::sqrt(z / base.mu);
    FiberSum f0 = fiber_sum_Q(base, s, z, M, conv, wh);
    FiberSum f1 = fiber_sum_Q(base, s, z * c.qpow(2), M, conv, shift_w_half(shift_w_half(wh, 1, c), 1, c));
    FiberSum f2 = fiber_sum_Q(base, s, z * c.qpow(-2), M, conv, shift_w_half(shift_w_half(wh, -1, c), -1, c));
    Mat T = transfer_matrix(z, M, c).matrix;
    auto ph = phi_scalars(conv, z, c);
    Mat lhs = f0.Q.op.matrix * T;
    Mat rhs = ipow(ph.first, M) * f0.factor1 * f1.Q.op.matrix + ipow(ph.second, M) * f0.factor2 * f2.Q.op.matrix;
    double sc = std::max({f0.Q.scale, f1.Q.scale, f2.Q.scale}) *
                std::max({T.norm(), std::pow(std::abs(ph.first), M), std::pow(std::abs(ph.second), M)});
    return scaled_diff(lhs, rhs, sc);
}

// Baxter's explicit auxiliary matrix on S^z = 0; alpha is the column (input) state.
inline ChainOperator baxter_Q(cplx z, int M, const RootContext& c, bool scaled = true) {
    if (M % 2) throw Error("OddChain", "Baxter's formula needs even M");
    const long dimH = 1L << M;
    const double gamma = c.gamma();
    const cplx zq = z * c.q;
    const cplx u = std::log(zq);
    Mat Q = Mat::Zero(dimH, dimH);
    std::vector<long> sector;
    for (long a = 0; a < dimH; ++a)
        if (twice_sz(a, M) == 0) sector.push_back(a);
    for (long a : sector)
        for (long b : sector) {
            int s1 = 0, s2 = 0;
            for (int m = 0; m < M; ++m) {
                int am = spin_bit(a, m, M) ? -1 : 1, bm = spin_bit(b, m, M) ? -1 : 1;
                s2 += am * bm;
                for (int n = 0; n < m; ++n) {
                    int an = spin_bit(a, n, M) ? -1 : 1, bn = spin_bit(b, n, M) ? -1 : 1;
                    s1 += an * bm - am * bn;
                }
            }
            cplx phase = expi(0.25 * gamma * s1);
            cplx mag = scaled ? ipow(zq, (s2 + M) / 4) : std::exp(0.25 * u * double(s2));
            Q(b, a) = phase * mag;
        }
    return {M, Q, "QBaxter"};
}

inline std::vector<long> sector_indices(int M, int twoSz) {
    std::vector<long> out;
    for (long a = 0; a < (1L << M); ++a)
        if (twice_sz(a, M) == twoSz) out.push_back(a);
    return out;
}

inline Mat restrict_to(const Mat& X, const std::vector<long>& idx) {
    Mat out(long(idx.size()), long(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j) out(long(i), long(j)) = X(idx[i], idx[j]);
    return out;
}

// T Q = (b q^{(N-1)/2})^M Q(zq^2) + (a q^{(1-N)/2})^M Q(zq^{-2}) on S^z = 0
inline double baxter_residual(cplx z, int M, const RootContext& c) {
    auto idx = sector_indices(M, 0);
    Mat Q0 = restrict_to(baxter_Q(z, M, c).matrix, idx);
    Mat Q1 = restrict_to(baxter_Q(z * c.qpow(2), M, c).matrix, idx);
    Mat Q2 = restrict_to(baxter_Q(z * c.qpow(-2), M, c).matrix, idx);
    Mat T = restrict_to(transfer_matrix(z, M, c).matrix, idx);
    BoltzmannWeights w = weights(z, c);
    cplx f1 = w.b * c.qpow((c.N - 1) / 2), f2 = w.a * c.qpow((1 - c.N) / 2);
    Mat lhs = T * Q0;
    return (lhs - ipow(f1, M) * Q1 - ipow(f2, M) * Q2).norm() / lhs.norm();
}

// Same, with the bare b^M, a^M coefficients.
inline double baxter_residual_bare(cplx z, int M, const RootContext& c) {
    auto idx = sector_indices(M, 0);
    Mat Q0 = restrict_to(baxter_Q(z, M, c).matrix, idx);
    Mat Q1 = restrict_to(baxter_Q(z * c.qpow(2), M, c).matrix, idx);
    Mat Q2 = restrict_to(baxter_Q(z * c.qpow(-2), M, c).matrix, idx);
    Mat T = restrict_to(transfer_matrix(z, M, c).matrix, idx);
    BoltzmannWeights w = weights(z, c);
    Mat lhs = T * Q0;
    return (lhs - ipow(w.b, M) * Q1 - ipow(w.a, M) * Q2).norm() / lhs.norm();
}

enum class Law { QSz, SQ, QR, QR0, Qp, transpose, TQS };

inline Law parse_law(const std::string& s) {
    if (s == "QSz") return Law::QSz;
    if (s == "SQ") return Law::SQ;
    if (s == "QR") return Law::QR;
    if (s == "QR0") return Law::QR0;
    if (s == "Qp") return Law::Qp;
    if (s == "transpose") return Law::transpose;
    if (s == "TQS") return Law::TQS;
    throw Error("ConfigInvalid", "unknown law " + s);
}

// Even context whose q is minus the q of an odd context of order N'.
inline RootContext negated_context(const RootContext& odd) {
    if (!odd.odd) throw Error("LawPreconditionViolated", "needs an odd root");
    return make_root_context(2 * odd.N, (2 * odd.k + odd.N) % (2 * odd.N));
}

struct TqsReport {
    double literal = 0;    // Q(z,-q) S T(z,q) as stated
    double corrected = 0;  // with T(z,-q) = U T(z,q) U S, U = sigma^z on odd sites
};

// p lives at the odd root qt = -q; q itself has even order 2N'.
inline TqsReport tqs_check(const SpecZPoint& p, cplx z, int M) {
    if (M % 2) throw Error("LawPreconditionViolated", "TQS needs even M");
    const RootContext& ct = p.ctx;
    const RootContext ce = negated_context(ct);
    const cplx wh = std::sqrt(z / p.mu);
    Mat Q = build_Q(p, z, M, Convention::phab, Gradation::homogeneous, wh).op.matrix;
    Mat Q1 = build_Q(prime_point(p), z * ct.qpow(2), M, Convention::phab, Gradation::homogeneous,
                     shift_w_half(wh, 1, ct)).op.matrix;
    Mat Q2 = build_Q(double_prime_point(p), z * ct.qpow(-2), M, Convention::phab, Gradation::homogeneous,
                     shift_w_half(wh, -1, ct)).op.matrix;
    Mat T = transfer_matrix(z, M, ce).matrix;
    Mat S = symmetry_ops(M).S.matrix;
    Mat U = odd_site_sigma_z(M);
    BoltzmannWeights w = weights(z, ce);
    Mat rhs = ipow(w.b, M) * Q1 + ipow(w.a, M) * Q2;
    TqsReport r;
    r.literal = rel_diff(Mat(Q * S * T), rhs);
    r.corrected = rel_diff(Mat(Q * U * T * U * S), rhs);
    return r;
}

inline double transformation_check(Law law, const SpecZPoint& p, cplx z, int M, cplx t = 0.3) {
    const auto& c = p.ctx;
    const Convention conv = default_convention(c);
    const RepParams cp = chart_for(p);
    const QMatrix Qm = build_Q(p, z, M, conv);
    const Mat& Q = Qm.op.matrix;
    const double sc = Qm.scale;
    auto rel_diff = [sc](const Mat& a, const Mat& b) { return scaled_diff(a, b, sc); };
    const SymmetryOps sym = symmetry_ops(M);
    const cplx w = z / p.mu;
    switch (law) {
        case Law::QSz: {
            RepParams r = cp;
            const double np = c.Nprime;
            r.xi = std::exp(-t * np) * cp.xi;
            r.zeta = std::exp(t * np) * cp.zeta;
            SpecZPoint pt = point_with_mu(r, p.mu);
            return rel_diff(sz_exp_conj(Q, t, M), build_Q(pt, z, M, conv).op.matrix);
        }
        case Law::SQ: {
            if (c.Nprime % 2 == 0) throw Error("LawPreconditionViolated", "SQ needs odd N'");
            RepParams r = cp;
            r.xi = -cp.xi;
            r.zeta = -cp.zeta;
            SpecZPoint ps = point_with_mu(r, p.mu);
            return rel_diff(Mat(sym.S.matrix * Q * sym.S.matrix), build_Q(ps, z, M, conv).op.matrix);
        }
        case Law::QR: {
            if (!c.odd) throw Error("LawPreconditionViolated", "QR is checked at odd N");
            SpecZPoint pr = spin_reversal_point(p);
            Mat QR = build_Q(pr, z / (p.mu * p.mu), M, conv).op.matrix;
            return rel_diff(Mat(sym.R.matrix * Q * sym.R.matrix), Mat(ipow(p.zc, M) * sz_conj(QR, w, M)));
        }
        case Law::QR0: {
            if (!cp.nilpotent()) throw Error("LawPreconditionViolated", "QR0 needs a nilpotent point");
            SpecZPoint pr = spin_reversal_point(p);
            const cplx lam = cp.lambda;
            Mat QR = build_Q(pr, z * lam * lam * c.qpow(2), M, conv).op.matrix;
            cplx pref = c.odd ? ipow(lam, long(c.Nprime) * M) : cplx(1.0);
            return rel_diff(Mat(sym.R.matrix * Q * sym.R.matrix), Mat(pref * QR));
        }
        case Law::Qp: {
            const cplx y = std::sqrt(w);
            Mat Qp = build_Q(p, z, M, conv, Gradation::principal, y).op.matrix;
            return rel_diff(Qp, sz_conj(Q, y, M));
        }
        case Law::transpose: {
            if (!c.odd) throw Error("LawPreconditionViolated", "transpose law is checked at odd N");
            Mat Qt = build_Q(p, p.mu * p.mu / (z * c.qpow(2)), M, conv).op.matrix;
            Mat rhs = ipow(-w * c.q, M) * sz_conj(Mat(Qt.transpose()), -w, M);
            return rel_diff(Mat(sym.R.matrix * Q * sym.R.matrix), rhs);
        }
        case Law::TQS:
            return tqs_check(p, z, M).corrected;
    }
    return 0;
}

// ||[A, B]|| / (||A|| ||B||); a vanishing operator commutes with everything
inline double q_commutator(const QMatrix& a, const QMatrix& b) {
    if (a.vanishing() || b.vanishing()) return 0.0;
    const Mat& x = a.op.matrix;
    const Mat& y = b.op.matrix;
    const double nx = std::max(x.norm(), QMatrix::kVanish * a.scale);
    const double ny = std::max(y.norm(), QMatrix::kVanish * b.scale);
    return (x * y - y * x).norm() / std::max(nx * ny, 1e-300);
}

struct CommuteResult {
    bool predicate = false;
    double residual = 0;
};

inline bool commute_predicate_only(const SpecZPoint& a, const SpecZPoint& b, cplx za, cplx zb, double tol = 1e-9) {
    auto eq = [&](cplx u, cplx v) { return std::abs(u - v) <= tol * std::max({1.0, std::abs(u), std::abs(v)}); };
    bool c1 = eq(a.x * (1.0 - b.zc), b.x * (1.0 - a.zc));
    bool c2 = eq(a.y * (1.0 - 1.0 / b.zc), b.y * (1.0 - 1.0 / a.zc));
    const long n = a.ctx.N;
    bool c3 = eq(ipow(za / a.mu, n), ipow(zb / b.mu, n));
    return c1 && c2 && c3;
}

inline CommuteResult commute_predicate(const SpecZPoint& a, const SpecZPoint& b, cplx za, cplx zb, int M) {
    CommuteResult r;
    r.predicate = commute_predicate_only(a, b, za, zb);
    r.residual = q_commutator(build_Q(a, za, M, default_convention(a.ctx)), build_Q(b, zb, M, default_convention(b.ctx)));
    return r;
}

inline double qt_commutator(const QMatrix& Q, cplx w) {
    if (Q.vanishing()) return 0.0;
    Mat T = transfer_matrix(w, Q.op.M, Q.p.ctx).matrix;
    const Mat& q = Q.op.matrix;
    const double qn = std::max(q.norm(), QMatrix::kVanish * Q.scale);
    return (q * T - T * q).norm() / std::max(qn * T.norm(), 1e-300);
}

}  // namespace auxq
