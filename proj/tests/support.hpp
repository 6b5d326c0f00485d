#pragma once

#include "auxq/auxq.hpp"
#include "auxq/golden.hpp"

#include <random>

namespace auxq::testing {

struct Draw {
    std::mt19937_64 rng;
    explicit Draw(std::uint64_t seed) : rng(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    cplx normal(double s = 1.0) {
        std::normal_distribution<double> n(0.0, s);
        return {n(rng), n(rng)};
    }
    cplx annulus(double r0, double r1) { return std::polar(uniform(r0, r1), uniform(0.0, 2.0 * kPi)); }
    cplx spectral() { return annulus(0.4, 1.6); }

    RepParams cyclic(const RootContext& c) {
        RepParams p;
        p.ctx = c;
        p.xi = normal(0.7);
        p.zeta = normal(0.7);
        p.lambda = annulus(0.6, 1.4);
        return p;
    }
    RepParams nilpotent(const RootContext& c) {
        RepParams p;
        p.ctx = c;
        p.lambda = annulus(0.6, 1.4);
        return p;
    }
    // cyclic at odd N, nilpotent at even N
    RepParams generic(const RootContext& c) { return c.odd ? cyclic(c) : nilpotent(c); }
};

// basis index of a spin string such as "uddu"; site 1 first
inline long state(const char* s) {
    long r = 0;
    for (; *s; ++s) r = r * 2 + (*s == 'd');
    return r;
}

// Brute-force tr_0 X_{0M} ... X_{01} from explicit operators on V (x) (C^2)^{(x)M}.
inline Mat brute_chain(const SiteBlocks& L, int M) {
    const long d = L.dim();
    const long dimH = 1L << M;
    Mat total = Mat::Identity(d * dimH, d * dimH);
    for (int m = 0; m < M; ++m) {
        Mat op = Mat::Zero(d * dimH, d * dimH);
        for (int so = 0; so < 2; ++so)
            for (int si = 0; si < 2; ++si) {
                Mat e = Mat::Zero(2, 2);
                e(so, si) = 1.0;
                Mat left = Mat::Identity(1L << m, 1L << m), right = Mat::Identity(1L << (M - 1 - m), 1L << (M - 1 - m));
                op += kron(L.b[so][si], kron(left, kron(e, right)));
            }
        total = op * total;
    }
    Mat out = Mat::Zero(dimH, dimH);
    for (long i = 0; i < d; ++i) out += total.block(i * dimH, i * dimH, dimH, dimH);
    return out;
}

inline golden::Point3 point3(const SpecZPoint& p, cplx z) {
    return {p.ctx.q, z / p.mu, p.zc, p.x, p.y, p.c, p.mu};
}

// smallest relative distance from x to a member of the set
inline double nearest(cplx x, const std::vector<cplx>& set) {
    double best = 1e300;
    for (cplx s : set) best = std::min(best, std::abs(x - s) / std::max({std::abs(s), std::abs(x), 1e-300}));
    return best;
}

}  // namespace auxq::testing
