#pragma once

// Closed forms for the N = 3 chains of length 3 and 4, as functions of the
// central values. q is a primitive cube root of unity, w = z / mu.

#include "sixvertex.hpp"

#include <map>

namespace auxq::golden {

struct Point3 {
    cplx q, w, zc, x, y, c, mu;
};

// M = 3 with rho_pm = 3^{-1/3} (wq)^{(1 +- 1)/2}
inline double m3_rho_scale() { return std::pow(3.0, -1.0 / 3.0); }

inline std::map<std::string, cplx> m3_traces(const Point3& p) {
    const cplx w = p.w, Z = p.zc, q = p.q, w3 = w * w * w;
    return {{"trA3", w3 * Z * Z - Z},
            {"trB3", w3 * p.y * Z * Z},
            {"trC3", p.x * Z},
            {"trD3", w3 * Z - Z * Z},
            {"trA2D", w * q * Z * (1.0 - w * q * Z)},
            {"trABC", w * Z * (1.0 - w * Z)},
            {"trACB", w * q * Z * (q - w * Z)}};
}

// eigenvalues on S^z = +-3/2
inline std::pair<cplx, cplx> m3_qpm(const Point3& p) {
    const cplx Z = p.zc, w3 = p.w * p.w * p.w;
    cplx r = std::sqrt((Z - 1.0) * (Z - 1.0) * (w3 + 1.0) * (w3 + 1.0) + 4.0 * w3 * p.x * p.y * Z);
    return {Z / 2.0 * ((w3 - 1.0) * (Z + 1.0) + r), Z / 2.0 * ((w3 - 1.0) * (Z + 1.0) - r)};
}

// S^z = 1/2: Q_0, Q_1, Q_2
inline std::vector<cplx> m3_half(const Point3& p) {
    return {0.0, 3.0 * p.q * p.w * p.zc, -3.0 * p.q * p.q * p.w * p.w * p.zc * p.zc};
}

inline cplx m3_T_pm(cplx z, cplx q) {
    auto wt = weights_at(z, q);
    return ipow(wt.a, 3) + ipow(wt.b, 3);
}

inline std::vector<cplx> m3_T_half(cplx z, cplx q) {
    auto wt = weights_at(z, q);
    cplx a3 = ipow(wt.a, 3), b3 = ipow(wt.b, 3);
    return {b3 * q + a3 * q * q, b3 * q * q + a3 * q};
}

// M = 4, S^z = -1, rho_+ = qw, rho_- = 1
inline std::map<std::string, cplx> m4_minus1_elements(const Point3& p) {
    const cplx w = p.w, Z2 = p.zc * p.zc, q = p.q, c = p.c;
    return {{"trAD3", -9.0 * w * Z2 * (w * w + q)},
            {"trBCD2", -3.0 * w * Z2 * (1.0 + q * w * w + 2.0 * w * q * q * c)},
            {"trBDCD", -3.0 * w * Z2 * (w * w + q - w * q * q * c)},
            {"trCBD2", -3.0 * w * Z2 * (q * q + q * q * w * w + 2.0 * w * q * q * c)}};
}

inline std::vector<cplx> m4_minus1_Q(const Point3& p) {
    const cplx w = p.w, Z2 = p.zc * p.zc, q = p.q, c = p.c, mu = p.mu;
    const double s3 = std::sqrt(3.0);
    return {-9.0 * Z2 * w * (w + q * q / mu) * (w + q * q * mu),
            -15.0 * Z2 * w * (w - q * q / mu) * (w - q * q * mu),
            -3.0 * Z2 * w * (w * w * (2.0 - s3) + w * q * q * c + q * (2.0 + s3)),
            -3.0 * Z2 * w * (w * w * (2.0 + s3) + w * q * q * c + q * (2.0 - s3))};
}

inline std::vector<cplx> m4_minus1_T(cplx z, cplx q) {
    auto wt = weights_at(z, q);
    const cplx a = wt.a, b = wt.b, cc = wt.c * wt.cprime, I(0, 1);
    const cplx base = a * a * a * b + a * b * b * b;
    return {base + (a * a + a * b + b * b) * cc, base - (a * a - a * b + b * b) * cc,
            base - (I * a * a + a * b - I * b * b) * cc, base + (I * a * a - a * b - I * b * b) * cc};
}

// both sides of the scalar identity behind T_1 on S^z = -1
inline std::pair<cplx, cplx> m4_tqex1(cplx z, cplx q, cplx mu) {
    auto wt = weights_at(z, q);
    const cplx T1 = m4_minus1_T(z, q)[0];
    const cplx q2 = q * q, q4 = q2 * q2, mu2 = mu * mu;
    const cplx phi1 = wt.b * q, phi2 = wt.a / q;
    cplx lhs = z * (z + q2) * (z + q2 * mu2) * T1;
    cplx rhs = ipow(phi1, 4) * z * q2 * (z * q2 + q2) * (z * q2 + q4 * mu2) +
               ipow(phi2, 4) * z / q2 * (z / q2 + q2) * (z / q2 + mu2);
    return {lhs, rhs};
}

// solved from the identity above; the a^4 term carries q^{-10} = q^2
inline cplx m4_T1_closed(cplx z, cplx q) {
    auto wt = weights_at(z, q);
    return ipow(wt.b, 4) * q * (z + 1.0) / (z + q * q) + ipow(wt.a, 4) * q * q * (z + q) / (z + q * q);
}

// M = 4, S^z = 0 elements m_1 ... m_7
inline std::vector<cplx> m4_zero_elements(const Point3& p) {
    const cplx w = p.w, Z2 = p.zc * p.zc, q = p.q, c = p.c, q2 = q * q;
    const cplx w2 = w * w, w3 = w2 * w;
    cplx m1 = 3.0 * Z2 * (q * w2 * w2 + 4.0 * q2 * w2 + 1.0);
    cplx m2 = 3.0 * Z2 * (c * w3 - q2 * w2 + c * q * w);
    cplx m3 = 3.0 * Z2 * (c * q * w3 + 2.0 * q2 * w2 + c * w);
    cplx m4 = 3.0 * Z2 * (c * q2 * w3 + 2.0 * q2 * w2 + c * q2 * w);
    cplx m6 = 3.0 * Z2 * q2 * w2 * (c * c - 2.0 - q - 1.0 / q);
    cplx m7 = 3.0 * Z2 * q2 * w2 * (c * c + 2.0);
    return {m1, m2, m3, m4, m2, m6, m7};
}

inline std::vector<cplx> m4_zero_Q(const Point3& p) {
    auto m = m4_zero_elements(p);
    const cplx I(0, 1);
    cplx s = std::sqrt(32.0 * m[1] * m[1] + (m[2] + m[3] + m[5] - m[6]) * (m[2] + m[3] + m[5] - m[6]));
    return {m[0] - m[6],
            m[0] + m[5] - m[2] - m[3],
            m[0] - m[5] + I * (m[2] - m[3]),
            m[0] - m[5] - I * (m[2] - m[3]),
            0.5 * (2.0 * m[0] + m[2] + m[3] + m[5] + m[6] + s),
            0.5 * (2.0 * m[0] + m[2] + m[3] + m[5] + m[6] - s)};
}

inline cplx m4_zero_Q1_factored(const Point3& p) {
    const cplx w2 = p.w * p.w, q = p.q, mu2 = p.mu * p.mu;
    return 3.0 * p.zc * p.zc * q * (w2 - q * mu2) * (w2 - q / mu2);
}

inline std::vector<cplx> m4_zero_T(cplx z, cplx q) {
    auto wt = weights_at(z, q);
    const cplx a = wt.a, b = wt.b, cc = wt.c * wt.cprime, I(0, 1);
    const cplx ab2 = a * a * b * b, s = a * a + b * b;
    cplx r = cc * std::sqrt(32.0 * ab2 + (s - cc) * (s - cc));
    return {2.0 * ab2 - cc * cc, 2.0 * ab2 - s * cc, 2.0 * ab2 + I * (a * a - b * b) * cc,
            2.0 * ab2 - I * (a * a - b * b) * cc, 0.5 * (4.0 * ab2 + cc * (s + cc) + r),
            0.5 * (4.0 * ab2 + cc * (s + cc) - r)};
}

// Baxter's curves on S^z = 0, including the (zq)^{M/4} factor
inline std::vector<cplx> m4_baxter_Q(cplx z, cplx q) {
    const cplx I(0, 1), q2 = q * q;
    cplx r = std::sqrt(32.0 * q2 + (1.0 + q2) * (1.0 + q2));
    return {z * z * q2 - 1.0,
            q2 * (z * z - (1.0 + q) * z + q),
            q2 * (z * z - I * (1.0 - q) * z - q),
            q2 * (z * z + I * (1.0 - q) * z - q),
            0.5 * (2.0 * z * z * q2 + (1.0 + q2) * z + 2.0 + z * r),
            0.5 * (2.0 * z * z * q2 + (1.0 + q2) * z + 2.0 - z * r)};
}

// Baxter's matrix elements before the normalization factor
inline std::map<std::string, cplx> m4_baxter_elements(cplx z, cplx q) {
    return {{"m1", z * q}, {"m7", 1.0 / (z * q)}, {"m6", 1.0 / (z * q)}, {"m2", 1.0},
            {"m5", 1.0},   {"m3", 1.0 / q},       {"m4", q}};
}

// s = 0 fiber sums of the first four curves
inline std::vector<cplx> m4_fiber_Q(cplx z, cplx q, cplx zc) {
    const cplx I(0, 1), f = 9.0 * zc * zc * q * q;
    return {-f * (z * z - q), f * (z * z - (1.0 + q) * z + q), -f * (z * z + I * (1.0 - q) * z - q),
            -f * (z * z - I * (1.0 - q) * z - q)};
}

}  // namespace auxq::golden
