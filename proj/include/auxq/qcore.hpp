#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace auxq {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kDefaultTol = 1e-9;

// Every failure carries a short machine-readable kind, e.g. "NonPrimitive".
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

inline cplx expi(double phi) { return {std::cos(phi), std::sin(phi)}; }

struct RootContext {
    int N = 3;
    int k = 1;
    cplx q;
    int Nprime = 3;
    bool odd = true;

    // q^m through the exact angle 2*pi*k*m/N
    cplx qpow(long m) const {
        long r = ((k * m) % N + N) % N;
        return expi(2.0 * kPi * double(r) / double(N));
    }
    // q^{m/2} with the fixed choice q^{1/2} = exp(i*pi*k/N)
    cplx qhalf(long m) const {
        long twoN = 2L * N;
        long r = ((k * m) % twoN + twoN) % twoN;
        return expi(kPi * double(r) / double(N));
    }
    cplx qmq() const { return q - 1.0 / q; }
    double gamma() const { return std::arg(q); }
};

inline RootContext make_root_context(int N, int k) {
    if (N < 3) throw Error("OrderTooSmall", "N must be at least 3");
    if (std::gcd(N, ((k % N) + N) % N) != 1) throw Error("NonPrimitive", "gcd(k,N) != 1");
    RootContext c;
    c.N = N;
    c.k = ((k % N) + N) % N;
    c.q = c.qpow(1);
    c.odd = (N % 2) == 1;
    c.Nprime = c.odd ? N : N / 2;
    for (int m = 1; m < N; ++m)
        if (std::abs(c.qpow(m) - 1.0) <= 1e-12) throw Error("NonPrimitive", "q^m = 1 for m < N");
    return c;
}

inline cplx q_bracket(long n, const RootContext& c) {
    return (c.qpow(n) - c.qpow(-n)) / c.qmq();
}

inline cplx lambda_bracket(cplx lambda, long n, const RootContext& c) {
    if (lambda == cplx(0.0)) throw Error("ZeroLambda", "lambda must be nonzero");
    return (lambda * c.qpow(-n) - c.qpow(n) / lambda) / c.qmq();
}

inline cplx big_F(cplx x, const RootContext& c) {
    cplx p = 1.0;
    if (c.odd) {
        for (int l = 0; l < c.N; ++l) p *= x + c.qpow(l) + c.qpow(-l);
    } else {
        for (int l = 0; l < c.N; l += 2) p *= x - c.qpow(l + 1) - c.qpow(-l - 1);
    }
    return p - 2.0;
}

inline cplx ipow(cplx x, long n) {
    if (n < 0) return 1.0 / ipow(x, -n);
    cplx r = 1.0;
    while (n) {
        if (n & 1) r *= x;
        x *= x;
        n >>= 1;
    }
    return r;
}

struct ComplexPoly {
    std::vector<cplx> coef;  // ascending degree; empty is the zero polynomial
    char var = 'z';

    int degree() const { return int(coef.size()) - 1; }
    bool zero() const { return coef.empty(); }
    cplx operator()(cplx x) const {
        cplx r = 0.0;
        for (auto it = coef.rbegin(); it != coef.rend(); ++it) r = r * x + *it;
        return r;
    }
    double max_abs() const {
        double m = 0;
        for (auto& a : coef) m = std::max(m, std::abs(a));
        return m;
    }
    void trim() {
        while (!coef.empty() && coef.back() == cplx(0.0)) coef.pop_back();
    }
};

// Newton divided differences, then expansion to the monomial basis.
inline ComplexPoly interpolate(const std::vector<std::pair<cplx, cplx>>& samples, char var = 'z') {
    const size_t n = samples.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (std::abs(samples[i].first - samples[j].first) == 0.0)
                throw Error("DuplicateAbscissa", "interpolation nodes must be distinct");
    std::vector<cplx> d(n);
    for (size_t i = 0; i < n; ++i) d[i] = samples[i].second;
    for (size_t j = 1; j < n; ++j)
        for (size_t i = n - 1; i >= j; --i) {
            d[i] = (d[i] - d[i - 1]) / (samples[i].first - samples[i - j].first);
            if (i == j) break;
        }
    std::vector<cplx> c(n, 0.0);
    for (size_t jj = n; jj-- > 0;) {
        // c <- c*(x - x_jj) + d[jj]
        std::vector<cplx> nc(n, 0.0);
        for (size_t t = 0; t + 1 < n; ++t) nc[t + 1] += c[t];
        for (size_t t = 0; t < n; ++t) nc[t] -= c[t] * samples[jj].first;
        nc[0] += d[jj];
        c.swap(nc);
    }
    ComplexPoly p{c, var};
    double m = p.max_abs();
    for (auto& a : p.coef)
        if (std::abs(a) < 1e-10 * m) a = 0.0;
    p.trim();
    return p;
}

struct EigenResult {
    std::vector<cplx> eigenvalues;
    Mat eigenvectors;
    std::vector<double> residuals;
    double tol = kDefaultTol;
};

inline bool lex_less(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

inline EigenResult eig_dense(const Mat& A, double tol = kDefaultTol) {
    if (A.rows() != A.cols()) throw Error("NotSquare", "eig_dense needs a square matrix");
    if (A.rows() > 4096) throw Error("TooLarge", "dimension above 4096");
    EigenResult r;
    r.tol = tol;
    const long n = A.rows();
    if (n == 0) return r;
    Eigen::ComplexEigenSolver<Mat> es(A, true);
    if (es.info() != Eigen::Success) throw Error("NoConvergence", "QR iteration budget exhausted");
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0);
    const Vec& ev = es.eigenvalues();
    std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return lex_less(ev[a], ev[b]); });
    r.eigenvectors.resize(n, n);
    const double an = std::max(A.norm(), 1e-300);
    for (long i = 0; i < n; ++i) {
        Vec v = es.eigenvectors().col(order[i]);
        v.normalize();
        r.eigenvalues.push_back(ev[order[i]]);
        r.eigenvectors.col(i) = v;
        double res = (A * v - ev[order[i]] * v).norm();
        r.residuals.push_back(res);
        if (res > tol * an) throw Error("NoConvergence", "eigenpair residual above tolerance");
    }
    return r;
}

inline std::vector<cplx> poly_roots(const ComplexPoly& p0, double tol = kDefaultTol) {
    ComplexPoly p = p0;
    p.trim();
    if (p.zero()) throw Error("ZeroPolynomial", "roots of the zero polynomial");
    if (p.degree() < 1) return {};
    std::vector<cplx> roots;
    size_t lead = 0;
    while (p.coef[lead] == cplx(0.0)) {
        roots.push_back(0.0);
        ++lead;
    }
    std::vector<cplx> c(p.coef.begin() + long(lead), p.coef.end());
    const int n = int(c.size()) - 1;
    if (n >= 1) {
        Mat comp = Mat::Zero(n, n);
        for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
        Eigen::ComplexEigenSolver<Mat> es(comp, false);
        if (es.info() != Eigen::Success) throw Error("NoConvergence", "companion eigenvalues");
        ComplexPoly q{c, p.var};
        ComplexPoly dq;
        for (int i = 1; i <= n; ++i) dq.coef.push_back(double(i) * c[i]);
        for (int i = 0; i < n; ++i) {
            cplx r = es.eigenvalues()[i];
            for (int it = 0; it < 4; ++it) {
                cplx d = dq(r);
                if (std::abs(d) < 1e-300) break;
                cplx nr = r - q(r) / d;
                if (std::abs(q(nr)) > std::abs(q(r))) break;
                r = nr;
            }
            roots.push_back(r);
        }
    }
    for (auto r : roots) {
        double scale = 0;
        for (int i = 0; i <= p.degree(); ++i) scale += std::abs(p.coef[i]) * std::pow(std::abs(r), i);
        if (std::abs(p(r)) > std::max(tol, 1e-6) * scale)
            throw Error("NoConvergence", "root failed back-substitution");
    }
    std::stable_sort(roots.begin(), roots.end(), lex_less);
    return roots;
}

struct RootCluster {
    cplx value;
    int multiplicity = 1;
};

// Groups roots within tol^{1/2} (relative to max(1,|r|)).
inline std::vector<RootCluster> cluster_roots(const std::vector<cplx>& roots, double tol = kDefaultTol) {
    std::vector<RootCluster> out;
    const double rad = std::sqrt(tol);
    for (auto r : roots) {
        bool placed = false;
        for (auto& cl : out)
            if (std::abs(cl.value - r) <= rad * std::max(1.0, std::abs(r))) {
                cl.value = (cl.value * double(cl.multiplicity) + r) / double(cl.multiplicity + 1);
                ++cl.multiplicity;
                placed = true;
                break;
            }
        if (!placed) out.push_back({r, 1});
    }
    return out;
}

inline double rel_diff(const Mat& a, const Mat& b) {
    double s = std::max(a.norm(), b.norm());
    if (s == 0.0) return 0.0;
    return (a - b).norm() / s;
}

inline double rel_diff(cplx a, cplx b) {
    double s = std::max(std::abs(a), std::abs(b));
    if (s == 0.0) return 0.0;
    return std::abs(a - b) / s;
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

inline Mat mpow(const Mat& a, long n) {
    if (n < 0) return mpow(a.inverse(), -n);
    Mat r = Mat::Identity(a.rows(), a.cols());
    Mat b = a;
    while (n) {
        if (n & 1) r = r * b;
        b = b * b;
        n >>= 1;
    }
    return r;
}

}  // namespace auxq
