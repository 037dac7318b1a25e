#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>

namespace abhms {

using cplx = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

inline constexpr double pi = 3.14159265358979323846;
inline const cplx I_unit{0.0, 1.0};

/// e^{2πi x} for real x, with the argument reduced mod 1 first to keep phases accurate.
inline cplx unit_phase(double x) {
    const double r = x - std::floor(x);
    return std::polar(1.0, 2.0 * pi * r);
}

/// Representative of x mod 1 in [0,1).
inline double wrap01(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    return r;
}

inline RealVector wrap01(const RealVector& v) {
    RealVector out(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) out[j] = wrap01(v[j]);
    return out;
}

/// Distance on ℝ/ℤ.
inline double wrap_distance(double x, double y) {
    const double d = wrap01(x - y);
    return std::min(d, 1.0 - d);
}

inline bool same_mod_one(const RealVector& x, const RealVector& y, double tol = 1e-10) {
    if (x.size() != y.size()) return false;
    for (Eigen::Index j = 0; j < x.size(); ++j)
        if (wrap_distance(x[j], y[j]) >= tol) return false;
    return true;
}

inline double max_asymmetry(const RealMatrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

/// Exact determinant of a small integer matrix (fraction-free Bareiss elimination).
inline std::int64_t int_determinant(IntMatrix m) {
    const Eigen::Index n = m.rows();
    if (n == 0) return 1;
    std::int64_t sign = 1, prev = 1;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            Eigen::Index p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            m.row(k).swap(m.row(p));
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i)
            for (Eigen::Index j = k + 1; j < n; ++j)
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

/// Numerical rank with singular values above rel_tol·σ_max (and above abs_floor).
inline int numerical_rank(const ComplexMatrix& m, double rel_tol = 1e-8, double abs_floor = 0.0) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0;
    const double thr = std::max(rel_tol * s[0], abs_floor);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > thr) ++r;
    return r;
}

inline RealMatrix to_real(const IntMatrix& m) { return m.cast<double>(); }

} // namespace abhms
