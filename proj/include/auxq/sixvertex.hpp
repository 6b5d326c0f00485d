#pragma once

#include "qcore.hpp"

#include <array>
#include <functional>

namespace auxq {

using RhoFn = std::function<cplx(cplx, cplx)>;
inline RhoFn unit_rho() { return [](cplx, cplx) { return cplx(1.0); }; }

struct BoltzmannWeights {
    cplx a, b, c, cprime, z;
};

inline BoltzmannWeights weights_at(cplx z, cplx q, cplx rho = 1.0) {
    cplx den = 1.0 - z * q * q;
    if (std::abs(den) < 1e-14) throw Error("PoleAtZ", "1 - z q^2 = 0");
    BoltzmannWeights w;
    w.z = z;
    w.a = rho;
    w.b = rho * (1.0 - z) * q / den;
    w.c = rho * (1.0 - q * q) / den;
    w.cprime = w.c * z;
    return w;
}

inline BoltzmannWeights weights(cplx z, const RootContext& ctx, const RhoFn& rho = unit_rho()) {
    return weights_at(z, ctx.q, rho(z, ctx.q));
}

enum class Gauge { homogeneous, principal };

inline Mat r_matrix_from(const BoltzmannWeights& w) {
    Mat R = Mat::Zero(4, 4);
    R(0, 0) = R(3, 3) = w.a;
    R(1, 1) = R(2, 2) = w.b;
    R(1, 2) = w.c;
    R(2, 1) = w.cprime;
    return R;
}

inline Mat r_matrix(cplx z, const RootContext& ctx, const RhoFn& rho = unit_rho(),
                    Gauge g = Gauge::homogeneous) {
    Mat R = r_matrix_from(weights(z, ctx, rho));
    if (g == Gauge::principal) {
        cplx xh = std::sqrt(std::sqrt(z));  // x^{1/2}, x = z^{1/2}
        Mat d = Mat::Zero(4, 4);
        d(0, 0) = d(1, 1) = xh;
        d(2, 2) = d(3, 3) = 1.0 / xh;
        R = d * R * d.inverse();
    }
    return R;
}

// blocks[out][in] acting on the auxiliary space; site spin up = 0
struct SiteBlocks {
    std::array<std::array<Mat, 2>, 2> b;
    long dim() const { return b[0][0].rows(); }
};

// R split over its second factor (the quantum site)
inline SiteBlocks r_blocks(const Mat& R) {
    SiteBlocks s;
    for (int so = 0; so < 2; ++so)
        for (int si = 0; si < 2; ++si) {
            Mat m(2, 2);
            for (int ao = 0; ao < 2; ++ao)
                for (int ai = 0; ai < 2; ++ai) m(ao, ai) = R(ao * 2 + so, ai * 2 + si);
            s.b[so][si] = m;
        }
    return s;
}

struct ChainOperator {
    int M = 0;
    Mat matrix;
    std::string label;
};

// <beta| tr_0 X_{0M} ... X_{01} |alpha>, contracted site by site per column.
inline Mat chain_trace(const SiteBlocks& L, int M) {
    if (M < 1) throw Error("ConfigInvalid", "M must be positive");
    const long d = L.dim();
    const long d2 = d * d;
    const long dimH = 1L << M;
    bool nz[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) nz[i][j] = L.b[i][j].cwiseAbs().maxCoeff() > 0.0;
    Mat out = Mat::Zero(dimH, dimH);
    std::vector<cplx> cur, nxt;
    std::vector<char> live, nlive;
    for (long a = 0; a < dimH; ++a) {
        cur.assign(size_t(d2), 0.0);
        for (long i = 0; i < d; ++i) cur[size_t(i * d + i)] = 1.0;
        live.assign(1, 1);
        for (int m = 0; m < M; ++m) {
            const int sa = int((a >> (M - 1 - m)) & 1);
            const long n = 1L << m;
            nxt.assign(size_t(2 * n * d2), 0.0);
            nlive.assign(size_t(2 * n), 0);
            for (long pre = 0; pre < n; ++pre) {
                if (!live[size_t(pre)]) continue;
                const cplx* P = &cur[size_t(pre * d2)];
                for (int sb = 0; sb < 2; ++sb) {
                    if (!nz[sb][sa]) continue;
                    const Mat& B = L.b[sb][sa];
                    cplx* Q = &nxt[size_t((pre * 2 + sb) * d2)];
                    for (long i = 0; i < d; ++i)
                        for (long k = 0; k < d; ++k) {
                            const cplx bik = B(i, k);
                            if (bik == cplx(0.0)) continue;
                            for (long j = 0; j < d; ++j) Q[i * d + j] += bik * P[k * d + j];
                        }
                    nlive[size_t(pre * 2 + sb)] = 1;
                }
            }
            cur.swap(nxt);
            live.swap(nlive);
        }
        for (long b = 0; b < dimH; ++b) {
            if (!live[size_t(b)]) continue;
            cplx tr = 0.0;
            for (long i = 0; i < d; ++i) tr += cur[size_t(b * d2 + i * d + i)];
            out(b, a) = tr;
        }
    }
    return out;
}

inline ChainOperator transfer_matrix(cplx z, int M, const RootContext& ctx, const RhoFn& rho = unit_rho(),
                                     Gauge g = Gauge::homogeneous) {
    return {M, chain_trace(r_blocks(r_matrix(z, ctx, rho, g)), M), "T"};
}

inline ChainOperator transfer_matrix_at(cplx z, int M, cplx q) {
    return {M, chain_trace(r_blocks(r_matrix_from(weights_at(z, q))), M), "T"};
}

inline int spin_bit(long basis, int site, int M) { return int((basis >> (M - 1 - site)) & 1); }

// 2 S^z of a basis state
inline int twice_sz(long basis, int M) {
    int s = 0;
    for (int m = 0; m < M; ++m) s += spin_bit(basis, m, M) ? -1 : 1;
    return s;
}

inline ChainOperator hamiltonian(int M, const RootContext& ctx) {
    if (M < 2) throw Error("ConfigInvalid", "H needs M >= 2");
    const long dimH = 1L << M;
    const cplx delta = (ctx.q + 1.0 / ctx.q) / 2.0;
    Mat H = Mat::Zero(dimH, dimH);
    for (long a = 0; a < dimH; ++a)
        for (int m = 0; m < M; ++m) {
            int n = (m + 1) % M;
            int sm = spin_bit(a, m, M), sn = spin_bit(a, n, M);
            if (sm != sn) {
                // sx sx + sy sy swaps antiparallel neighbours with weight 2
                long b = a ^ (1L << (M - 1 - m)) ^ (1L << (M - 1 - n));
                H(b, a) += 2.0;
                H(a, a) += delta * (-2.0);
            }
        }
    return {M, H, "H"};
}

struct SymmetryOps {
    ChainOperator Sz, R, S;
};

inline SymmetryOps symmetry_ops(int M) {
    const long dimH = 1L << M;
    SymmetryOps s;
    s.Sz = {M, Mat::Zero(dimH, dimH), "Sz"};
    s.R = {M, Mat::Zero(dimH, dimH), "R"};
    s.S = {M, Mat::Zero(dimH, dimH), "S"};
    for (long a = 0; a < dimH; ++a) {
        int tw = twice_sz(a, M);
        s.Sz.matrix(a, a) = 0.5 * tw;
        s.R.matrix(dimH - 1 - a, a) = 1.0;
        s.S.matrix(a, a) = ((M - tw) / 2) % 2 ? -1.0 : 1.0;
    }
    return s;
}

// sigma^z on the odd-numbered sites 1, 3, 5, ...
inline Mat odd_site_sigma_z(int M) {
    const long dimH = 1L << M;
    Mat U = Mat::Zero(dimH, dimH);
    for (long a = 0; a < dimH; ++a) {
        int s = 1;
        for (int m = 0; m < M; m += 2)
            if (spin_bit(a, m, M)) s = -s;
        U(a, a) = double(s);
    }
    return U;
}

struct RstReport {
    double inverse_q = 0;    // T(z,1/q) vs T(1/z,q)
    double minus_q = 0;      // T(z,-q) vs S T(z,q) as literally stated
    double minus_q_odd = 0;  // T(z,-q) vs U T(z,q) U S, U = sigma^z on odd sites
};

inline RstReport rst_checks(int M, cplx z, const RootContext& ctx) {
    if (M % 2) throw Error("LawPreconditionViolated", "RST needs even M");
    RstReport r;
    Mat a = transfer_matrix_at(z, M, 1.0 / ctx.q).matrix;
    Mat b = transfer_matrix_at(1.0 / z, M, ctx.q).matrix;
    r.inverse_q = rel_diff(a, b);
    Mat tm = transfer_matrix_at(z, M, -ctx.q).matrix;
    Mat t = transfer_matrix_at(z, M, ctx.q).matrix;
    Mat S = symmetry_ops(M).S.matrix;
    Mat U = odd_site_sigma_z(M);
    r.minus_q = rel_diff(tm, S * t);
    r.minus_q_odd = rel_diff(tm, U * t * U * S);
    return r;
}

inline cplx partition_function(cplx z, int M, int Mprime, const RootContext& ctx, const RhoFn& rho = unit_rho()) {
    Mat T = transfer_matrix(z, M, ctx, rho).matrix;
    return mpow(T, Mprime).trace();
}

}  // namespace auxq
