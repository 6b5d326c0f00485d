#pragma once

#include "qcore.hpp"

#include <array>
#include <optional>

namespace auxq {

struct RepParams {
    cplx xi = 0.0;
    cplx zeta = 0.0;
    cplx lambda = 1.0;
    RootContext ctx;
    cplx lambda_half = 0.0;  // 0 means principal sqrt(lambda)

    bool nilpotent() const { return xi == cplx(0.0) && zeta == cplx(0.0); }
    cplx sqrt_lambda() const { return lambda_half == cplx(0.0) ? std::sqrt(lambda) : lambda_half; }
};

struct SpecZPoint {
    cplx x = 0.0, y = 0.0, zc = 1.0, c = 0.0, mu = 0.0;
    RootContext ctx;
    std::optional<RepParams> chart;
};

struct CyclicRep {
    Mat E, F, K;
    RepParams params;
    cplx eta = 0.0;
};

inline void check_params(const RepParams& p) {
    if (p.lambda == cplx(0.0)) throw Error("ZeroLambda", "lambda must be nonzero");
    if (!p.ctx.odd && !p.nilpotent())
        throw Error("EvenParityCyclic", "even roots of unity admit only nilpotent representations here");
}

inline cplx eta_of(const RepParams& p) {
    cplx e = p.xi;
    const cplx xz = p.xi * p.zeta;
    for (int n = 1; n < p.ctx.Nprime; ++n) e *= lambda_bracket(p.lambda, n - 1, p.ctx) * q_bracket(n, p.ctx) + xz;
    return e;
}

inline CyclicRep build_cyclic_rep(const RepParams& p) {
    check_params(p);
    const int n = p.ctx.Nprime;
    CyclicRep r;
    r.params = p;
    r.E = Mat::Zero(n, n);
    r.F = Mat::Zero(n, n);
    r.K = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        r.K(i, i) = p.lambda * p.ctx.qpow(-2 * i);
        if (i + 1 < n) r.F(i + 1, i) = 1.0;
        else r.F(0, i) += p.zeta;
        if (i > 0) r.E(i - 1, i) = lambda_bracket(p.lambda, i - 1, p.ctx) * q_bracket(i, p.ctx) + p.xi * p.zeta;
        else r.E(n - 1, 0) += p.xi;
    }
    r.eta = eta_of(p);
    return r;
}

inline double qg_residual(const Mat& E, const Mat& F, const Mat& K, const RootContext& c) {
    Mat Ki = K.inverse();
    double s = std::max({E.norm(), F.norm(), K.norm(), 1.0});
    double r1 = (K * E * Ki - c.qpow(2) * E).norm();
    double r2 = (K * F * Ki - c.qpow(-2) * F).norm();
    double r3 = (E * F - F * E - (K - Ki) / c.qmq()).norm();
    return std::max({r1, r2, r3}) / s;
}

inline cplx casimir_of(const RepParams& p) {
    const auto& c = p.ctx;
    return c.q * p.lambda + 1.0 / (c.q * p.lambda) + c.qmq() * c.qmq() * p.xi * p.zeta;
}

inline cplx mu_branch(cplx cval, const RepParams& p, double tol = kDefaultTol) {
    const auto& c = p.ctx;
    cplx m = 1.0 / (p.lambda * c.q);
    if (std::abs(cval - 2.0) < tol || std::abs(m - 1.0) < tol) throw Error("DegenerateMu", "mu = 1");
    if (p.nilpotent()) return m;
    const cplx base = c.q * p.lambda + 1.0 / (c.q * p.lambda);
    const cplx shift = cval - base;  // (q-1/q)^2 xi zeta, taken from c itself
    const int steps = 32;
    for (int i = 1; i <= steps; ++i) {
        double s = double(i) / steps;
        cplx cc = base + s * s * shift;
        cplx d = std::sqrt(cc * cc - 4.0);
        cplx r1 = (cc + d) / 2.0, r2 = (cc - d) / 2.0;
        if (std::abs(r1 - r2) < 1e-8 * std::max(1.0, std::abs(r1)))
            throw Error("AmbiguousBranch", "double root met while tracking mu");
        m = std::abs(r1 - m) <= std::abs(r2 - m) ? r1 : r2;
    }
    if (std::abs(m - 1.0) < tol) throw Error("DegenerateMu", "mu = 1");
    return m;
}

inline double sz_residual(const SpecZPoint& p) {
    const double sgn = p.ctx.odd ? 1.0 : -1.0;
    cplx lhs = p.x * p.y + sgn * (p.zc + 1.0 / p.zc);
    cplx rhs = big_F(p.c, p.ctx);
    double s = std::max({1.0, std::abs(lhs), std::abs(rhs), std::abs(p.x * p.y)});
    return std::abs(lhs - rhs) / s;
}

inline SpecZPoint central_point(const RepParams& p) {
    check_params(p);
    const auto& c = p.ctx;
    SpecZPoint s;
    s.ctx = c;
    const cplx f = ipow(c.qmq(), c.Nprime);
    s.x = f * eta_of(p);
    s.y = f * p.zeta;
    s.zc = ipow(p.lambda, c.Nprime);
    s.c = casimir_of(p);
    s.mu = mu_branch(s.c, p);
    s.chart = p;
    if (sz_residual(s) > 1e-8) throw Error("HypersurfaceViolation", "central values leave Spec Z");
    return s;
}

inline SpecZPoint central_values(const CyclicRep& r) { return central_point(r.params); }

inline bool in_discriminant(const SpecZPoint& p, double tol = 1e-9) {
    if (std::abs(p.x) > tol || std::abs(p.y) > tol) return false;
    const auto& c = p.ctx;
    for (int l = 1; l < c.N; ++l) {
        cplx cl = c.qpow(l) + c.qpow(-l);
        if (c.odd) {
            for (double sz : {1.0, -1.0})
                for (double sc : {1.0, -1.0})
                    if (std::abs(p.zc - sz) < tol && std::abs(p.c - sc * cl) < tol) return true;
        } else if (l != c.Nprime) {
            double sz = (l % 2 == 1) ? 1.0 : -1.0;
            if (std::abs(p.zc - sz) < tol && std::abs(p.c - cl) < tol) return true;
        }
    }
    return false;
}

// Parameters of the subrepresentation (w -> wq) and of the quotient (w -> w/q).
inline RepParams prime_params(const RepParams& p, cplx mu) {
    const auto& c = p.ctx;
    cplx den = mu - c.q * p.lambda;
    if (std::abs(den) < 1e-14) throw Error("PoleInParams", "mu = q lambda");
    RepParams r = p;
    r.xi = c.qpow(-c.Nprime) * p.xi * (c.q * mu - p.lambda) / den;
    r.zeta = c.qpow(c.Nprime) * p.zeta;
    r.lambda = p.lambda * c.qpow(-1);
    r.lambda_half = p.sqrt_lambda() * c.qhalf(-1);
    return r;
}

inline RepParams double_prime_params(const RepParams& p, cplx mu) {
    const auto& c = p.ctx;
    cplx den = mu - c.q * p.lambda;
    if (std::abs(den) < 1e-14) throw Error("PoleInParams", "mu = q lambda");
    RepParams r = p;
    r.xi = c.qpow(-c.Nprime) * p.xi * (mu * c.qpow(-1) - p.lambda * c.qpow(2)) / den;
    r.zeta = c.qpow(c.Nprime) * p.zeta;
    r.lambda = p.lambda * c.q;
    r.lambda_half = p.sqrt_lambda() * c.qhalf(1);
    return r;
}

inline SpecZPoint point_with_mu(const RepParams& r, cplx mu) {
    const auto& c = r.ctx;
    SpecZPoint s;
    s.ctx = c;
    const cplx f = ipow(c.qmq(), c.Nprime);
    s.x = f * eta_of(r);
    s.y = f * r.zeta;
    s.zc = ipow(r.lambda, c.Nprime);
    s.c = casimir_of(r);
    s.mu = mu;
    s.chart = r;
    return s;
}

inline SpecZPoint prime_point(const SpecZPoint& p) {
    if (!p.chart) throw Error("NoChart", "point carries no coordinates");
    return point_with_mu(prime_params(*p.chart, p.mu), p.mu * p.ctx.q);
}

inline SpecZPoint double_prime_point(const SpecZPoint& p) {
    if (!p.chart) throw Error("NoChart", "point carries no coordinates");
    return point_with_mu(double_prime_params(*p.chart, p.mu), p.mu / p.ctx.q);
}

// For even N the step mu -> mu q flips z, so the fiber advances by q^2.
inline std::vector<SpecZPoint> fiber(const SpecZPoint& p) {
    if (in_discriminant(p)) throw Error("DiscriminantPoint", "fiber undefined on D");
    std::vector<SpecZPoint> out{p};
    SpecZPoint cur = p;
    for (int l = 1; l < p.ctx.Nprime; ++l) {
        cur = prime_point(cur);
        if (!p.ctx.odd) cur = prime_point(cur);
        if (sz_residual(cur) > 1e-8) throw Error("HypersurfaceViolation", "fiber point leaves Spec Z");
        out.push_back(cur);
    }
    return out;
}

inline RepParams reversal_coordinates(const RepParams& p) {
    check_params(p);
    const auto& c = p.ctx;
    RepParams r = p;
    r.lambda = 1.0 / (p.lambda * c.qpow(2));
    r.lambda_half = -1.0 / (p.sqrt_lambda() * c.q);
    const cplx eta = eta_of(p);
    r.zeta = eta;
    if (p.nilpotent()) {
        r.xi = 0.0;
        return r;
    }
    // xi^R * prod_{n=1}^{N'-1}([lambda^R;n-1][n] + xi^R eta) = zeta
    std::vector<cplx> poly{0.0, 1.0};
    for (int n = 1; n < c.Nprime; ++n) {
        cplx a = lambda_bracket(r.lambda, n - 1, c) * q_bracket(n, c);
        std::vector<cplx> np(poly.size() + 1, 0.0);
        for (size_t i = 0; i < poly.size(); ++i) {
            np[i] += a * poly[i];
            np[i + 1] += eta * poly[i];
        }
        poly.swap(np);
    }
    poly[0] -= p.zeta;
    ComplexPoly P{poly, 'z'};
    P.trim();
    const SpecZPoint s = point_with_mu(p, 1.0);
    double best = 1e300;
    cplx pick = 0.0;
    for (cplx root : poly_roots(P, 1e-8)) {
        RepParams t = r;
        t.xi = root;
        SpecZPoint u = point_with_mu(t, 1.0);
        double sc = std::max({1.0, std::abs(s.c), std::abs(s.y)});
        double err = (std::abs(u.c - s.c) + std::abs(u.x - s.y) + std::abs(u.y - s.x)) / sc;
        if (err < best) {
            best = err;
            pick = root;
        }
    }
    if (best > 1e-6) throw Error("NoSolution", "no reversal root reproduces the central values");
    r.xi = pick;
    return r;
}

inline SpecZPoint spin_reversal_point(const SpecZPoint& p) {
    SpecZPoint r = p;
    r.x = p.y;
    r.y = p.x;
    r.zc = 1.0 / p.zc;
    r.mu = 1.0 / p.mu;
    r.chart.reset();
    if (p.chart && (p.ctx.odd || p.chart->nilpotent())) r.chart = reversal_coordinates(*p.chart);
    return r;
}

// Coordinates for a bare point: the chart whose continued mu matches p.mu.
inline RepParams chart_for(const SpecZPoint& p, double tol = 1e-7) {
    if (p.chart) return *p.chart;
    const auto& c = p.ctx;
    RepParams r;
    r.ctx = c;
    const cplx f = ipow(c.qmq(), c.Nprime);
    const double scale = std::max({1.0, std::abs(p.x), std::abs(p.y)});
    if (std::abs(p.y) <= 1e-13 * scale) {
        r.lambda = 1.0 / (c.q * p.mu);
        cplx prod = f;
        for (int n = 1; n < c.Nprime; ++n) prod *= lambda_bracket(r.lambda, n - 1, c) * q_bracket(n, c);
        r.xi = std::abs(p.x) <= 1e-13 * scale ? cplx(0.0) : p.x / prod;
        if (!c.odd && r.xi != cplx(0.0)) throw Error("EvenParityCyclic", "even N needs x = y = 0");
        return r;
    }
    if (!c.odd) throw Error("EvenParityCyclic", "even N needs x = y = 0");
    r.zeta = p.y / f;
    const cplx root = std::exp(std::log(p.zc) / double(c.Nprime));
    double best = 1e300;
    RepParams pick = r;
    for (int j = 0; j < c.Nprime; ++j) {
        RepParams t = r;
        t.lambda = root * c.qpow(j);
        t.xi = (p.c - c.q * t.lambda - 1.0 / (c.q * t.lambda)) / (c.qmq() * c.qmq() * t.zeta);
        cplx x = f * eta_of(t);
        double err = std::abs(x - p.x) / scale;
        double merr = 1.0;
        try {
            merr = std::abs(mu_branch(p.c, t) - p.mu) / std::max(1.0, std::abs(p.mu));
        } catch (const Error&) {
        }
        double score = err + (merr < 1e-6 ? 0.0 : 1e-3);
        if (score < best) {
            best = score;
            pick = t;
        }
    }
    if (std::abs(f * eta_of(pick) - p.x) / scale > tol) throw Error("NoChart", "no coordinates reproduce x");
    return pick;
}

// ---- loop algebra -------------------------------------------------------

enum class Gradation { homogeneous, principal };
enum class Gen { e0, f0, k0, e1, f1, k1 };

struct LoopGens {
    std::array<Mat, 2> e, f, k;
};

struct EvalRep {
    CyclicRep rep;
    cplx w = 1.0;
    Gradation gradation = Gradation::homogeneous;
    LoopGens gens;
};

struct TwoDimRep {
    cplx z = 1.0;
    Gradation gradation = Gradation::homogeneous;
    LoopGens gens;
};

inline EvalRep evaluation_rep(const CyclicRep& rep, cplx w, Gradation g = Gradation::homogeneous,
                              cplx x_half = 0.0) {
    if (w == cplx(0.0)) throw Error("ZeroEvaluationParameter", "w must be nonzero");
    EvalRep r{rep, w, g, {}};
    Mat Ki = rep.K.inverse();
    if (g == Gradation::homogeneous) {
        r.gens.e = {w * rep.F, rep.E};
        r.gens.f = {rep.E / w, rep.F};
    } else {
        cplx x = x_half == cplx(0.0) ? std::sqrt(w) : x_half;
        r.gens.e = {x * rep.F, x * rep.E};
        r.gens.f = {rep.E / x, rep.F / x};
    }
    r.gens.k = {Ki, rep.K};
    return r;
}

inline Mat sigma_plus() { Mat s = Mat::Zero(2, 2); s(0, 1) = 1.0; return s; }
inline Mat sigma_minus() { Mat s = Mat::Zero(2, 2); s(1, 0) = 1.0; return s; }
inline Mat sigma_x() { Mat s = Mat::Zero(2, 2); s(0, 1) = 1.0; s(1, 0) = 1.0; return s; }
inline Mat sigma_z() { Mat s = Mat::Zero(2, 2); s(0, 0) = 1.0; s(1, 1) = -1.0; return s; }

inline TwoDimRep two_dim_rep(cplx z, const RootContext& c, Gradation g = Gradation::homogeneous,
                             cplx x_half = 0.0) {
    TwoDimRep r;
    r.z = z;
    r.gradation = g;
    Mat kq = Mat::Zero(2, 2);
    kq(0, 0) = c.q;
    kq(1, 1) = 1.0 / c.q;
    if (g == Gradation::homogeneous) {
        r.gens.e = {z * sigma_minus(), sigma_plus()};
        r.gens.f = {sigma_plus() / z, sigma_minus()};
    } else {
        cplx x = x_half == cplx(0.0) ? std::sqrt(z) : x_half;
        r.gens.e = {x * sigma_minus(), x * sigma_plus()};
        r.gens.f = {sigma_plus() / x, sigma_minus() / x};
    }
    r.gens.k = {kq.inverse(), kq};
    return r;
}

inline const Mat& gen_matrix(const LoopGens& g, Gen x) {
    switch (x) {
        case Gen::e0: return g.e[0];
        case Gen::f0: return g.f[0];
        case Gen::k0: return g.k[0];
        case Gen::e1: return g.e[1];
        case Gen::f1: return g.f[1];
        default: return g.k[1];
    }
}

// (piA (x) piB) Delta(x), or Delta^op when opposite is set.
inline Mat coproduct_action(Gen x, const LoopGens& A, const LoopGens& B, bool opposite = false) {
    const int i = (x == Gen::e0 || x == Gen::f0 || x == Gen::k0) ? 0 : 1;
    const Mat IA = Mat::Identity(A.k[0].rows(), A.k[0].rows());
    const Mat IB = Mat::Identity(B.k[0].rows(), B.k[0].rows());
    switch (x) {
        case Gen::e0:
        case Gen::e1:
            return opposite ? Mat(kron(IA, B.e[i]) + kron(A.e[i], B.k[i]))
                            : Mat(kron(A.e[i], IB) + kron(A.k[i], B.e[i]));
        case Gen::f0:
        case Gen::f1:
            return opposite ? Mat(kron(A.k[i].inverse(), B.f[i]) + kron(A.f[i], IB))
                            : Mat(kron(A.f[i], B.k[i].inverse()) + kron(IA, B.f[i]));
        default:
            return kron(A.k[i], B.k[i]);
    }
}

// Max residual of the loop-algebra relations and both Chevalley-Serre relations.
inline double loop_relation_residual(const LoopGens& g, const RootContext& c) {
    double r = 0;
    const double s = std::max({g.e[0].norm(), g.e[1].norm(), g.f[0].norm(), g.f[1].norm(), 1.0});
    const cplx b3 = q_bracket(3, c);
    for (int i = 0; i < 2; ++i) {
        Mat ki = g.k[i].inverse();
        for (int j = 0; j < 2; ++j) {
            int a = i == j ? 2 : -2;
            r = std::max(r, (g.k[i] * g.e[j] * ki - c.qpow(a) * g.e[j]).norm() / s);
            r = std::max(r, (g.k[i] * g.f[j] * ki - c.qpow(-a) * g.f[j]).norm() / s);
            Mat comm = g.e[i] * g.f[j] - g.f[j] * g.e[i];
            Mat want = i == j ? Mat((g.k[i] - ki) / c.qmq()) : Mat::Zero(comm.rows(), comm.cols());
            r = std::max(r, (comm - want).norm() / s);
            if (i != j) {
                const Mat& ei = g.e[i];
                const Mat& ej = g.e[j];
                Mat cs = ei * ei * ei * ej - b3 * ei * ei * ej * ei + b3 * ei * ej * ei * ei - ej * ei * ei * ei;
                const Mat& fi = g.f[i];
                const Mat& fj = g.f[j];
                Mat cf = fi * fi * fi * fj - b3 * fi * fi * fj * fi + b3 * fi * fj * fi * fi - fj * fi * fi * fi;
                r = std::max(r, cs.norm() / (s * s * s * s));
                r = std::max(r, cf.norm() / (s * s * s * s));
            }
        }
    }
    return r;
}

// ---- quantum coadjoint action ----------------------------------------------

inline cplx expm1_over(cplx s) {
    // (e^s - 1)/s with the removable singularity handled
    if (std::abs(s) < 1e-6) return 1.0 + s / 2.0 + s * s / 6.0;
    return (std::exp(s) - 1.0) / s;
}

inline SpecZPoint coadjoint_flow(const SpecZPoint& p, char gen, cplx t) {
    if (!p.ctx.odd) throw Error("EvenParity", "coadjoint flows are taken at odd N");
    if (in_discriminant(p)) throw Error("DiscriminantPoint", "fixed point of the action");
    SpecZPoint r = p;
    r.chart.reset();
    const cplx z = p.zc, zi = 1.0 / p.zc;
    if (gen == 'e') {
        const cplx s = t * p.x;
        r.zc = std::exp(-s) * z;
        // (e^{-tx}-1)/x = -t g(-tx), (e^{tx}-1)/x = t g(tx)
        r.y = p.y - (z * (-t) * expm1_over(-s) + zi * t * expm1_over(s));
    } else if (gen == 'f') {
        const cplx s = t * p.y;
        r.zc = std::exp(s) * z;
        r.x = p.x - (z * t * expm1_over(s) + zi * (-t) * expm1_over(-s));
    } else {
        throw Error("ConfigInvalid", "generator must be e or f");
    }
    return r;
}

inline cplx flow_invariant(const SpecZPoint& p) { return p.x * p.y + p.zc + 1.0 / p.zc; }

}  // namespace auxq
