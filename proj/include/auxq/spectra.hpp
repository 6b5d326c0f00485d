#pragma once

#include "qop.hpp"

#include <functional>
#include <random>

namespace auxq {

enum class Grading { Sz, SzModNprime, momentum };

struct SectorBlock {
    std::vector<long> indices;  // basis states spanning the sector
    Mat basis;                  // columns in the full space; a selection unless graded by momentum
    Mat block;
    int twoSz = 0;              // for SzModNprime: the residue of 2S^z mod 2N'
    int momentum = -1;          // -1 when not graded by momentum
};

// cyclic shift of the chain by one site
inline Mat translation(int M) {
    const long n = 1L << M;
    Mat P = Mat::Zero(n, n);
    for (long a = 0; a < n; ++a) {
        long b = ((a >> 1) | ((a & 1) << (M - 1)));
        P(b, a) = 1.0;
    }
    return P;
}

inline std::vector<SectorBlock> sector_blocks(const ChainOperator& op, Grading g, int Nprime = 0,
                                              double tol = 1e-12) {
    const int M = op.M;
    const long n = 1L << M;
    const Mat& X = op.matrix;
    std::vector<SectorBlock> out;
    const double xn = std::max(X.norm(), 1e-300);
    if (g == Grading::SzModNprime) {
        if (Nprime < 1) throw Error("ConfigInvalid", "SzModNprime grading needs N'");
        const int mod = 2 * Nprime;
        for (int r = 0; r < mod; ++r) {
            SectorBlock s;
            s.twoSz = r;
            for (long a = 0; a < n; ++a)
                if (((twice_sz(a, M) % mod) + mod) % mod == r) s.indices.push_back(a);
            if (!s.indices.empty()) out.push_back(s);
        }
    } else {
        for (int tw = M; tw >= -M; tw -= 2) {
            auto idx = sector_indices(M, tw);
            if (g == Grading::Sz) {
                out.push_back({idx, Mat(), Mat(), tw, -1});
                continue;
            }
            // momentum states sum_j e^{-2 pi i k j / M} P^j |r>
            std::vector<long> reps;
            std::vector<int> period;
            std::vector<char> seen(size_t(n), 0);
            for (long a : idx) {
                if (seen[size_t(a)]) continue;
                long b = a;
                int per = 0;
                do {
                    seen[size_t(b)] = 1;
                    b = ((b >> 1) | ((b & 1) << (M - 1)));
                    ++per;
                } while (b != a);
                reps.push_back(a);
                period.push_back(per);
            }
            for (int k = 0; k < M; ++k) {
                SectorBlock s;
                s.twoSz = tw;
                s.momentum = k;
                std::vector<Vec> cols;
                for (size_t i = 0; i < reps.size(); ++i) {
                    if ((k * period[i]) % M) continue;
                    Vec v = Vec::Zero(n);
                    long b = reps[i];
                    for (int j = 0; j < period[i]; ++j) {
                        v[b] += expi(-2.0 * kPi * k * j / M);
                        b = ((b >> 1) | ((b & 1) << (M - 1)));
                    }
                    cols.push_back(v.normalized());
                    s.indices.push_back(reps[i]);
                }
                if (cols.empty()) continue;
                s.basis = Mat::Zero(n, long(cols.size()));
                for (size_t i = 0; i < cols.size(); ++i) s.basis.col(long(i)) = cols[i];
                out.push_back(s);
            }
        }
    }
    // selection bases, blocks and the leak check
    Mat all = Mat::Zero(n, n);
    long col = 0;
    for (auto& s : out) {
        if (s.basis.size() == 0) {
            s.basis = Mat::Zero(n, long(s.indices.size()));
            for (size_t i = 0; i < s.indices.size(); ++i) s.basis(s.indices[i], long(i)) = 1.0;
        }
        s.block = s.basis.adjoint() * X * s.basis;
        all.middleCols(col, s.basis.cols()) = s.basis;
        col += s.basis.cols();
    }
    Mat Y = all.adjoint() * X * all;
    col = 0;
    for (auto& s : out) {
        Y.block(col, col, s.basis.cols(), s.basis.cols()).setZero();
        col += s.basis.cols();
    }
    if (Y.norm() > tol * xn) throw Error("NotBlockDiagonal", "operator couples different sectors");
    return out;
}

struct JointSpectrum {
    Mat basis;                                  // columns: common eigenvectors
    std::vector<std::vector<cplx>> eigenvalues; // eigenvalues[op][state]
    double residual = 0;                        // worst ||A v - l v|| / ||A||
};

inline double commutator_norm(const Mat& a, const Mat& b) {
    return (a * b - b * a).norm() / std::max(a.norm() * b.norm(), 1e-300);
}

// ops[0..] commute pairwise; diagonalize a seeded random combination
inline JointSpectrum joint_spectrum(const std::vector<Mat>& ops, double tol = 1e-9, std::uint64_t seed = 1) {
    if (ops.empty()) throw Error("ConfigInvalid", "no operators");
    for (size_t i = 0; i < ops.size(); ++i)
        for (size_t j = i + 1; j < ops.size(); ++j)
            if (commutator_norm(ops[i], ops[j]) > tol) throw Error("NonCommuting", "operators do not commute");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Mat X = Mat::Zero(ops[0].rows(), ops[0].cols());
    for (auto& A : ops) X += cplx(nd(rng), nd(rng)) * A / std::max(A.norm(), 1e-300);
    EigenResult er = eig_dense(X, 1e-6);
    JointSpectrum js;
    js.basis = er.eigenvectors;
    for (auto& A : ops) {
        std::vector<cplx> ev;
        const double an = std::max(A.norm(), 1e-300);
        for (long i = 0; i < js.basis.cols(); ++i) {
            Vec v = js.basis.col(i);
            cplx l = v.dot(A * v) / v.squaredNorm();
            ev.push_back(l);
            js.residual = std::max(js.residual, (A * v - l * v).norm() / an);
        }
        js.eigenvalues.push_back(ev);
    }
    return js;
}

inline Vec embed(const Vec& v, const Mat& basis) { return basis * v; }

using CurveFn = std::function<cplx(cplx)>;

// v^H X v / v^H v, checked to be an eigenvalue
inline cplx rayleigh(const Mat& X, const Vec& v, double tol, bool* drift = nullptr) {
    cplx l = v.dot(X * v) / v.squaredNorm();
    const double xn = X.norm();
    if ((X * v - l * v).norm() > tol * std::max(xn, 1e-300) * v.norm()) {
        if (drift) *drift = true;
        else throw Error("EigvecDrift", "vector is not an eigenvector at this sample");
    }
    if (std::abs(l) < QMatrix::kVanish * xn) l = 0.0;
    return l;
}

// Rayleigh quotients of op(x) at the samples, interpolated in x
inline ComplexPoly rayleigh_curve(const std::function<Mat(cplx)>& op, const Vec& v, const std::vector<cplx>& xs,
                                  double tol = 1e-8, char var = 'w') {
    std::vector<std::pair<cplx, cplx>> samples;
    bool allZero = true;
    for (cplx x : xs) {
        cplx l = rayleigh(op(x), v, tol);
        if (l != cplx(0.0)) allZero = false;
        samples.push_back({x, l});
    }
    if (allZero) return ComplexPoly{{}, var};
    return interpolate(samples, var);
}

// deterministic sample points away from the unit circle and the weight poles
inline std::vector<cplx> default_samples(int count, double radius = 0.7) {
    std::vector<cplx> zs;
    for (int i = 0; i < count; ++i)
        zs.push_back(std::polar(radius * (1.0 + 0.13 * i), 0.37 + 2.0 * kPi * i / (count + 0.5)));
    return zs;
}

// Eigenvalue of Q_p on eigvec as a polynomial in w = z / mu.
inline ComplexPoly eigenvalue_curve(const SpecZPoint& p, const Vec& eigvec, int M,
                                    std::vector<cplx> zs = {}, Convention conv = Convention::phodd,
                                    double rho_scale = 1.0, double tol = 1e-8) {
    if (zs.empty()) zs = default_samples(M + 2);
    if (int(zs.size()) < M + 2) throw Error("ConfigInvalid", "eigenvalue_curve needs M + 2 samples");
    const RepParams cp = chart_for(p);
    std::vector<cplx> ws;
    for (cplx z : zs) ws.push_back(z / p.mu);
    auto op = [&](cplx w) {
        return build_Q_params(cp, p, w * p.mu, M, conv, Gradation::homogeneous, 0.0, rho_scale).op.matrix;
    };
    return rayleigh_curve(op, eigvec, ws, tol, 'w');
}

// A curve in w attached to its mu, evaluated in z.
struct QCurve {
    ComplexPoly poly;
    cplx mu = 1.0;
    cplx operator()(cplx z) const { return poly(z / mu); }
    CurveFn fn() const { return [c = *this](cplx z) { return c(z); }; }
};

struct StringInfo {
    cplx center;  // one member; the string is center * period^j, j < N'
    int length = 0;
    std::string period;  // "q" or "q^2"
};

struct BetheRoot {
    cplx z;
    double residual = 0;
    bool trivial = false;  // both terms of the equation vanish on their own
    bool pole = false;     // sits on a pole of the weights; not evaluated
};

struct BetheAnalysis {
    ComplexPoly eigenvalueCurve;
    std::vector<StringInfo> strings;
    std::vector<BetheRoot> roots;
    int rootsAtInfinity = 0;  // zeros at w = 0
    int twoSz = 0;
    std::vector<double> residuals() const {
        std::vector<double> r;
        for (auto& b : roots) r.push_back(b.residual);
        return r;
    }
};

// |phi1^M Q'(zq^2) + phi2^M Q''(zq^-2)| relative to the size of the two terms
inline double bethe_residual(cplx z, const CurveFn& Q1, const CurveFn& Q2, const ComplexPoly& Q1abs,
                             const ComplexPoly& Q2abs, cplx mu1, cplx mu2, Convention conv, int M,
                             const RootContext& c, bool* trivial = nullptr) {
    auto ph = phi_scalars(conv, z, c);
    cplx t1 = ipow(ph.first, M) * Q1(z * c.qpow(2));
    cplx t2 = ipow(ph.second, M) * Q2(z * c.qpow(-2));
    auto size = [](const ComplexPoly& p, cplx x) {
        double s = 0;
        for (int i = 0; i <= p.degree(); ++i) s += std::abs(p.coef[size_t(i)]) * std::pow(std::abs(x), i);
        return s;
    };
    double S = std::pow(std::abs(ph.first), M) * size(Q1abs, z * c.qpow(2) / mu1) +
               std::pow(std::abs(ph.second), M) * size(Q2abs, z * c.qpow(-2) / mu2);
    double mag = std::abs(t1) + std::abs(t2);
    if (trivial) *trivial = mag < 1e-7 * S;
    return std::abs(t1 + t2) / std::max(mag, 1e-7 * S + 1e-300);
}

struct BetheInput {
    QCurve Q, Q1, Q2;  // eigenvalue curves at p, p', p''
    Convention conv = Convention::phodd;
    int M = 0;
    int twoSz = 0;
};

inline BetheAnalysis bethe_analysis(const BetheInput& in, const RootContext& c, double tol = 1e-9) {
    const ComplexPoly& curve = in.Q.poly;
    if (curve.zero()) throw Error("ZeroCurve", "identically zero eigenvalue");
    BetheAnalysis out;
    out.eigenvalueCurve = curve;
    out.twoSz = in.twoSz;
    std::vector<cplx> roots = poly_roots(curve, 1e-6);
    std::vector<cplx> finite;
    for (cplx r : roots) {
        if (std::abs(r) < 1e-7) ++out.rootsAtInfinity;
        else finite.push_back(r);
    }
    const cplx period = c.odd ? c.q : c.qpow(2);
    const int len = c.Nprime;
    const double match = 1e-5;
    std::vector<char> used(finite.size(), 0);
    for (size_t i = 0; i < finite.size(); ++i) {
        if (used[i]) continue;
        std::vector<size_t> members{i};
        cplx cur = finite[i];
        for (int j = 1; j < len; ++j) {
            cur *= period;
            size_t best = finite.size();
            double bd = match;
            for (size_t t = 0; t < finite.size(); ++t) {
                if (used[t] || std::find(members.begin(), members.end(), t) != members.end()) continue;
                double d = std::abs(finite[t] - cur) / std::abs(cur);
                if (d < bd) {
                    bd = d;
                    best = t;
                }
            }
            if (best == finite.size()) break;
            members.push_back(best);
        }
        if (int(members.size()) == len) {
            for (size_t t : members) used[t] = 1;
            out.strings.push_back({finite[i], len, c.odd ? "q" : "q^2"});
        }
    }
    for (size_t i = 0; i < finite.size(); ++i) {
        if (used[i]) continue;
        BetheRoot b;
        b.z = finite[i] * in.Q.mu;
        try {
            b.residual = bethe_residual(b.z, in.Q1.fn(), in.Q2.fn(), in.Q1.poly, in.Q2.poly, in.Q1.mu, in.Q2.mu,
                                        in.conv, in.M, c, &b.trivial);
        } catch (const Error& e) {
            if (e.kind() != "PoleAtZ") throw;
            b.pole = true;
        }
        out.roots.push_back(b);
    }
    (void)tol;
    return out;
}

inline cplx transfer_eigen_from_q(const CurveFn& Q, const CurveFn& Q1, const CurveFn& Q2, Convention conv, cplx z,
                                  int M, const RootContext& c, double tol = 1e-12) {
    cplx d = Q(z);
    auto ph = phi_scalars(conv, z, c);
    cplx t1 = ipow(ph.first, M) * Q1(z * c.qpow(2));
    cplx t2 = ipow(ph.second, M) * Q2(z * c.qpow(-2));
    if (std::abs(d) <= tol * std::max({std::abs(t1), std::abs(t2), 1.0}))
        throw Error("DivisionByZeroCurve", "Q eigenvalue vanishes at z");
    return (t1 + t2) / d;
}

// Rayleigh quotient of a z-dependent operator along a fixed vector
inline CurveFn rayleigh_fn(std::function<Mat(cplx)> op, Vec v, double tol = 1e-8) {
    return [op = std::move(op), v = std::move(v), tol](cplx z) { return rayleigh(op(z), v, tol); };
}

struct RatioReport {
    size_t fiberIndex = 0, baxterIndex = 0;
    cplx constant;
    double variance = 0;
    bool constantRatio = false;
};

inline ComplexPoly monic(const ComplexPoly& p) {
    ComplexPoly m = p;
    m.trim();
    if (m.zero()) return m;
    cplx lead = m.coef.back();
    for (auto& a : m.coef) a /= lead;
    return m;
}

inline double coef_distance(const ComplexPoly& a, const ComplexPoly& b) {
    size_t n = std::max(a.coef.size(), b.coef.size());
    double d = 0;
    for (size_t i = 0; i < n; ++i) {
        cplx x = i < a.coef.size() ? a.coef[i] : 0.0, y = i < b.coef.size() ? b.coef[i] : 0.0;
        d += std::norm(x - y);
    }
    return std::sqrt(d);
}

// Pairs each fiber-sum curve with the nearest monic Baxter curve and tests the ratio for constancy.
inline std::vector<RatioReport> baxter_comparison(const std::vector<ComplexPoly>& fiber,
                                                  const std::vector<ComplexPoly>& baxter,
                                                  const std::vector<cplx>& zs, double tol = 1e-8) {
    std::vector<RatioReport> out;
    std::vector<char> taken(baxter.size(), 0);
    for (size_t i = 0; i < fiber.size(); ++i) {
        if (fiber[i].zero()) continue;
        ComplexPoly fm = monic(fiber[i]);
        size_t best = baxter.size();
        double bd = 1e300;
        for (size_t j = 0; j < baxter.size(); ++j) {
            if (taken[j] || baxter[j].zero()) continue;
            double d = coef_distance(fm, monic(baxter[j]));
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        if (best == baxter.size()) continue;
        taken[best] = 1;
        RatioReport r;
        r.fiberIndex = i;
        r.baxterIndex = best;
        std::vector<cplx> ratios;
        cplx mean = 0.0;
        for (cplx z : zs) {
            ratios.push_back(fiber[i](z) / baxter[best](z));
            mean += ratios.back();
        }
        mean /= double(zs.size());
        double var = 0;
        for (cplx x : ratios) var += std::norm(x - mean);
        var /= double(zs.size());
        r.constant = mean;
        r.variance = var / std::max(std::norm(mean), 1e-300);
        r.constantRatio = r.variance < tol;
        out.push_back(r);
    }
    return out;
}

}  // namespace auxq
