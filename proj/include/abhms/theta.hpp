#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "multi_index.hpp"
#include "siegel.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace abhms {

/// Characteristic pair (c, d): c shifts the summation lattice, d shifts the argument.
struct ThetaChar {
    RealVector c;
    RealVector d;

    static ThetaChar zero(int g) { return {RealVector::Zero(g), RealVector::Zero(g)}; }
};

/// Tolerance for theta constants entering structure constants, so products stay within 1e-9 end to end.
inline constexpr double structure_tol = 1e-13;

struct ThetaOptions {
    double term_cap = 1e8;
    bool compensated = false;
};

/// Index set {n ∈ ℤ^g : |n_j − center_j| ≤ radius} stored as per-axis integer ranges.
struct LatticeBox {
    RealVector center;
    double radius = 0.0;
    std::vector<long long> lo, hi;

    double cardinality() const {
        double n = 1.0;
        for (std::size_t j = 0; j < lo.size(); ++j) n *= static_cast<double>(hi[j] - lo[j] + 1);
        return n;
    }
};

struct ThetaRequest {
    SiegelPoint tau;
    ComplexVector z;
    ThetaChar ch;
    double tol = 1e-12;
};

struct ThetaResult {
    cplx value;
    LatticeBox box;
};

namespace detail {

inline void check_char(const ThetaChar& ch, int g) {
    if (ch.c.size() != g || ch.d.size() != g) fail(ErrorKind::DimensionMismatch, "characteristic length must equal g");
    if (!ch.c.allFinite() || !ch.d.allFinite()) fail(ErrorKind::InvalidArgument, "non-finite characteristic");
}

inline void check_arg(const ComplexVector& z, int g) {
    if (z.size() != g) fail(ErrorKind::DimensionMismatch, "argument length must equal g");
    if (!z.real().allFinite() || !z.imag().allFinite()) fail(ErrorKind::InvalidArgument, "non-finite argument");
}

/// log of the bound on Σ_{n outside box} e^{−π uᵀΩu}, u = n − center, for box radius R.
inline double log_tail_bound(int g, double lambda, double R) {
    const double axis_total = 1.0 + 1.0 / std::sqrt(lambda);
    const double axis_tail = std::log(2.0) - pi * lambda * R * R - std::log1p(-std::exp(-2.0 * pi * lambda * R));
    return std::log(static_cast<double>(g)) + (g - 1) * std::log(axis_total) + axis_tail;
}

} // namespace detail

/// π Im(z)ᵀ Ω⁻¹ Im(z): log of the Gaussian envelope that bounds |ϑ[c,d](τ,z)| up to a τ-dependent constant.
inline double log_theta_envelope(const SiegelPoint& tau, const ComplexVector& z) {
    const RealVector y = z.imag();
    return pi * y.dot(tau.Omega_inv() * y);
}

/// Box around −c − Ω⁻¹Im z whose complement contributes less than tol to the series.
inline LatticeBox truncation_radius(const SiegelPoint& tau, const ThetaChar& ch, const ComplexVector& z, double tol,
                                    const ThetaOptions& opt = {}) {
    const int g = tau.genus();
    detail::check_char(ch, g);
    detail::check_arg(z, g);
    if (!(tol > 0)) fail(ErrorKind::InvalidArgument, "tol must be positive");

    const RealVector y = z.imag();
    const RealVector shift = tau.Omega_inv() * y;
    const double log_scale = pi * y.dot(shift);
    const double lambda = tau.lambda_min();
    const double target = std::log(tol);
    auto ok = [&](double R) { return log_scale + detail::log_tail_bound(g, lambda, R) < target; };

    const double guess = (log_scale + std::log(2.0 * g) + (g - 1) * std::log(1.0 + 1.0 / std::sqrt(lambda)) - target) /
                         (pi * lambda);
    double R = std::max(1.0, std::ceil(std::sqrt(std::max(0.0, guess))));
    if (!std::isfinite(R)) fail(ErrorKind::BoxTooLarge, "radius overflow");
    while (R > 1.0 && ok(R - 1.0)) R -= 1.0;
    while (!ok(R)) R += 1.0;

    LatticeBox box;
    box.center = -ch.c - shift;
    box.radius = R;
    box.lo.resize(g);
    box.hi.resize(g);
    for (int j = 0; j < g; ++j) {
        box.lo[j] = static_cast<long long>(std::ceil(box.center[j] - R));
        box.hi[j] = static_cast<long long>(std::floor(box.center[j] + R));
    }
    if (box.cardinality() > opt.term_cap)
        fail(ErrorKind::BoxTooLarge, "truncation box needs " + std::to_string(box.cardinality()) + " terms (radius " +
                                         std::to_string(R) + ")");
    return box;
}

/// Σ_n exp(πi vᵀτv + 2πi vᵀ(z+d)), v = n + c, summed lexicographically over a box.
inline cplx theta_sum_over_box(const SiegelPoint& tau, const ThetaChar& ch, const ComplexVector& z, const LatticeBox& box,
                               bool compensated = false) {
    const int g = tau.genus();
    std::vector<double> Bm(g * g), Wm(g * g), c(g), y(g), xd(g), v(g);
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            Bm[i * g + j] = tau.B()(i, j);
            Wm[i * g + j] = tau.Omega()(i, j);
        }
        c[i] = ch.c[i];
        y[i] = z[i].imag();
        xd[i] = z[i].real() + ch.d[i];
    }
    std::vector<long long> n(box.lo.begin(), box.lo.end());
    double sre = 0, sim = 0, cre = 0, cim = 0;
    auto add = [](double& s, double& comp, double t) {
        // Neumaier
        const double u = s + t;
        if (std::abs(s) >= std::abs(t))
            comp += (s - u) + t;
        else
            comp += (t - u) + s;
        s = u;
    };
    for (int j = 0; j < g; ++j)
        if (box.lo[j] > box.hi[j]) return {0.0, 0.0};
    while (true) {
        for (int j = 0; j < g; ++j) v[j] = static_cast<double>(n[j]) + c[j];
        double qB = 0, qW = 0, lin_re = 0, lin_im = 0;
        for (int i = 0; i < g; ++i) {
            double rb = 0, rw = 0;
            for (int j = 0; j < g; ++j) {
                rb += Bm[i * g + j] * v[j];
                rw += Wm[i * g + j] * v[j];
            }
            qB += v[i] * rb;
            qW += v[i] * rw;
            lin_re += v[i] * y[i];
            lin_im += v[i] * xd[i];
        }
        const double mag = std::exp(-pi * qW - 2.0 * pi * lin_re);
        const double phase = pi * qB + 2.0 * pi * lin_im;
        const double tre = mag * std::cos(phase), tim = mag * std::sin(phase);
        if (compensated) {
            add(sre, cre, tre);
            add(sim, cim, tim);
        } else {
            sre += tre;
            sim += tim;
        }
        int j = g - 1;
        while (j >= 0 && n[j] == box.hi[j]) {
            n[j] = box.lo[j];
            --j;
        }
        if (j < 0) break;
        ++n[j];
    }
    return {sre + cre, sim + cim};
}

inline ThetaResult theta_eval_full(const ThetaRequest& req, const ThetaOptions& opt = {}) {
    const LatticeBox box = truncation_radius(req.tau, req.ch, req.z, req.tol, opt);
    return {theta_sum_over_box(req.tau, req.ch, req.z, box, opt.compensated), box};
}

inline cplx theta_eval(const ThetaRequest& req, const ThetaOptions& opt = {}) { return theta_eval_full(req, opt).value; }

inline cplx theta_eval(const SiegelPoint& tau, const ComplexVector& z, const ThetaChar& ch, double tol = 1e-12) {
    return theta_eval(ThetaRequest{tau, z, ch, tol});
}

/// ϑ[c,d](τ, 0).
inline cplx theta_constant(const SiegelPoint& tau, const ThetaChar& ch, double tol = 1e-13) {
    return theta_eval(tau, ComplexVector::Zero(tau.genus()), ch, tol);
}

/// Residual of ϑ[c,d](τ, z+a+τb) = e^{2πi(cᵀa − dᵀb)} e^{−πi bᵀτb} e^{−2πi bᵀz} ϑ[c,d](τ,z).
///
/// Both sides grow like exp(π Im(z')ᵀΩ⁻¹Im(z')) with z' = z+a+τb, so the difference is reported
/// in units of that envelope; it coincides with the plain absolute residual when Im z' = 0.
inline double quasiperiodicity_residual(const SiegelPoint& tau, const ComplexVector& z, const ThetaChar& ch,
                                        const IntVector& a, const IntVector& b, double tol = 1e-12) {
    const int g = tau.genus();
    if (a.size() != g || b.size() != g) fail(ErrorKind::DimensionMismatch, "shift length must equal g");
    const RealVector ar = a.cast<double>(), br = b.cast<double>();
    const ComplexVector zs = z + ar.cast<cplx>() + tau.tau() * br.cast<cplx>();
    const double log_env_shifted = log_theta_envelope(tau, zs);
    const double log_env = log_theta_envelope(tau, z);

    const cplx lhs = theta_eval(tau, zs, ch, tol * std::exp(log_env_shifted));
    const cplx base = theta_eval(tau, z, ch, tol * std::exp(log_env));

    const double bBb = br.dot(tau.B() * br), bWb = br.dot(tau.Omega() * br);
    const double phase = ch.c.dot(ar) - ch.d.dot(br) - 0.5 * bBb - br.dot(z.real());
    const double log_mag = pi * bWb + 2.0 * pi * br.dot(z.imag());
    const cplx rhs = unit_phase(phase) * std::exp(log_mag - log_env_shifted) * base;
    return std::abs(lhs * std::exp(-log_env_shifted) - rhs);
}

/// e^{2πi cᵀdd}: ϑ[c+dc, d+dd] = factor · ϑ[c,d] for integer dc, dd.
inline cplx integral_shift_factor(const ThetaChar& ch, const IntVector& dc, const IntVector& dd) {
    if (dc.size() != ch.c.size() || dd.size() != ch.c.size()) fail(ErrorKind::DimensionMismatch, "shift length");
    return unit_phase(ch.c.dot(dd.cast<double>()));
}

} // namespace abhms
