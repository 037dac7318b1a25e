#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "multi_index.hpp"
#include "siegel.hpp"
#include "theta.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace abhms {

/// Affine Lagrangian ℓ_{k,b} = {θ ≡ b − k·r} (or the vertical torus {r ≡ b}) carrying the flat connection with holonomy a.
struct Brane {
    SiegelPoint tau;
    std::optional<int> slope; // nullopt: vertical
    RealVector a;
    RealVector b;

    bool vertical() const { return !slope.has_value(); }
    int k() const {
        if (!slope) fail(ErrorKind::VerticalSlope, "vertical brane has no finite slope");
        return *slope;
    }
    int genus() const { return tau.genus(); }

    static Brane make(const SiegelPoint& tau, std::optional<int> slope, const RealVector& a, const RealVector& b) {
        if (a.size() != tau.genus() || b.size() != tau.genus()) fail(ErrorKind::DimensionMismatch, "brane vectors");
        return {tau, slope, wrap01(a), wrap01(b)};
    }
    static Brane finite(const SiegelPoint& tau, int k, const RealVector& a, const RealVector& b) {
        return make(tau, k, a, b);
    }
    static Brane vertical_at(const SiegelPoint& tau, const RealVector& a, const RealVector& b) {
        return make(tau, std::nullopt, a, b);
    }

    /// z(x) = −a − τb, the point of V_τ a vertical brane is mirror to under the evaluation convention.
    ComplexVector evaluation_point() const { return -(a.cast<cplx>() + tau.tau() * b.cast<cplx>()); }

    bool operator==(const Brane& o) const { return tau == o.tau && slope == o.slope && a == o.a && b == o.b; }
};

enum class GeneratorKind { Transverse, Perturbed, SlopeVertical, VerticalSlope };

struct FloerGenerator {
    GeneratorKind kind;
    MultiIndex key; // λ (transverse), δ ∈ {0,1}^g (perturbed), empty (singletons)
    int degree;
    RealVector r, theta;
};

/// Formal linear combination of generators of CF(source, target), all of one degree.
struct FloerElement {
    Brane source;
    Brane target;
    int degree = 0;
    std::map<MultiIndex, cplx> coeffs;
    std::string note; // reason for a forced zero

    cplx coeff(const MultiIndex& key) const {
        auto it = coeffs.find(key);
        return it == coeffs.end() ? cplx{} : it->second;
    }
    bool is_zero() const {
        for (const auto& [k, v] : coeffs)
            if (v != cplx{}) return false;
        return true;
    }
};

struct PerturbationParams {
    double epsilon = 0.01;
    double quadrature_tol = 1e-10;
    bool unit_prefactor = false;
};

inline void validate(const PerturbationParams& p) {
    if (!(p.epsilon > 0.0 && p.epsilon < 0.1)) fail(ErrorKind::InvalidArgument, "epsilon must lie in (0, 0.1)");
    if (!(p.quadrature_tol > 0.0)) fail(ErrorKind::InvalidArgument, "quadrature_tol must be positive");
}

/// Degree-indexed complex; differential[w] maps degree w to degree w+1 (rows: targets, columns: sources).
struct FloerComplex {
    int g = 0;
    std::vector<FloerGenerator> generators;
    std::vector<std::vector<std::size_t>> by_degree;
    std::vector<ComplexMatrix> differential;
};

enum class PairKind { Transverse, EqualSlope, SlopeVertical, VerticalSlope, VerticalVertical };

inline PairKind pair_kind(const Brane& b1, const Brane& b2) {
    if (b1.vertical() && b2.vertical()) return PairKind::VerticalVertical;
    if (b1.vertical()) return PairKind::VerticalSlope;
    if (b2.vertical()) return PairKind::SlopeVertical;
    return b1.k() == b2.k() ? PairKind::EqualSlope : PairKind::Transverse;
}

/// Degree of the transverse generators of CF(ℓ_{k1}, ℓ_{k2}).
inline int transverse_degree(int k1, int k2, int g) { return k1 < k2 ? 0 : g; }

inline std::vector<FloerGenerator> intersection_points(const Brane& b1, const Brane& b2) {
    require_same_modulus(b1.tau, b2.tau);
    if (b1.vertical() || b2.vertical()) fail(ErrorKind::VerticalSlope, "use slope_vertical_generator");
    const int k1 = b1.k(), k2 = b2.k(), g = b1.genus();
    if (k1 == k2) fail(ErrorKind::EqualSlopes, "use perturbed_complex");
    const int K = k2 - k1;
    std::vector<FloerGenerator> out;
    for (const auto& lam : index_box(std::abs(K), g)) {
        RealVector r(g), th(g);
        for (int j = 0; j < g; ++j) {
            const double l = lam[static_cast<std::size_t>(j)];
            r[j] = wrap01((l + b2.b[j] - b1.b[j]) / K);
            th[j] = wrap01((-k1 * l + k2 * b1.b[j] - k1 * b2.b[j]) / K);
        }
        out.push_back({GeneratorKind::Transverse, lam, transverse_degree(k1, k2, g), r, th});
    }
    return out;
}

/// The single point of ℓ_{k,b1} ∩ ℓ_{∞,b2}: (r, θ) = (b2, b1 − k·b2), degree 0.
inline FloerGenerator slope_vertical_generator(const Brane& b1, const Brane& b2) {
    require_same_modulus(b1.tau, b2.tau);
    if (b1.vertical() || !b2.vertical()) fail(ErrorKind::InvalidArgument, "need (finite slope, vertical) branes");
    return {GeneratorKind::SlopeVertical, {}, 0, wrap01(b2.b), wrap01(RealVector(b1.b - b1.k() * b2.b))};
}

/// Same point seen from CF(ℓ_∞, ℓ_k); it sits in degree g.
inline FloerGenerator vertical_slope_generator(const Brane& b1, const Brane& b2) {
    require_same_modulus(b1.tau, b2.tau);
    if (!b1.vertical() || b2.vertical()) fail(ErrorKind::InvalidArgument, "need (vertical, finite slope) branes");
    return {GeneratorKind::VerticalSlope, {}, b1.genus(), wrap01(b1.b), wrap01(RealVector(b2.b - b2.k() * b1.b))};
}

// ---- quadrature ----

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
    const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4 * flm + fm), right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature of f on [a,b] to absolute tolerance tol.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Bigon u(t,s) = (r_j = t/2, y_j = s·sin πt), (t,s) ∈ [0,1]×[0, 2πε], with its partial derivatives.
struct Bigon {
    double epsilon;
    double s_max() const { return 2.0 * pi * epsilon; }
    double dr_dt(double, double) const { return 0.5; }
    double dr_ds(double, double) const { return 0.0; }
    double dy_dt(double t, double s) const { return s * pi * std::cos(pi * t); }
    double dy_ds(double t, double) const { return std::sin(pi * t); }
    double jacobian(double t, double s) const { return dr_dt(t, s) * dy_ds(t, s) - dr_ds(t, s) * dy_dt(t, s); }
};

/// Complexified area ∫ u*ω_τ of the bigon in direction j, ω_τ = Σ (BΩ⁻¹)_{jl} dr_j∧dy_l + i Σ dr_j∧dy_j.
inline cplx bigon_area(const SiegelPoint& tau, int j, const PerturbationParams& p) {
    const Bigon u{p.epsilon};
    const double w = tau.b_field_ratio()(j, j);
    const double tol = p.quadrature_tol;
    const double J = integrate(
        [&](double t) { return integrate([&](double s) { return u.jacobian(t, s); }, 0.0, u.s_max(), tol); }, 0.0, 1.0,
        tol);
    return {w * J, J};
}

/// A' = 2πε ∫₀¹ (BΩ⁻¹)_{jj} sin(πt) d(t/2): the B-field part of the isotoped connection along the bigon edge.
inline double bigon_connection_term(const SiegelPoint& tau, int j, const PerturbationParams& p) {
    const double w = tau.b_field_ratio()(j, j);
    return 2.0 * pi * p.epsilon * integrate([&](double t) { return w * std::sin(pi * t) * 0.5; }, 0.0, 1.0,
                                            p.quadrature_tol);
}

/// CF(b1, b2) for coincident Lagrangians after the Hamiltonian perturbation sin(2π r_j):
/// 2^g generators p_δ, ⟨∂p,q⟩ = (−1)^{#δ below j} e^{2πi(A+A')} (e^{πiΔa_j} − e^{−πiΔa_j}) when q = p + e_j.
/// Vertical pairs use the same Koszul shape with unit prefactor.
inline FloerComplex perturbed_complex(const Brane& b1, const Brane& b2, const PerturbationParams& params = {}) {
    validate(params);
    require_same_modulus(b1.tau, b2.tau);
    if (b1.vertical() != b2.vertical() || (!b1.vertical() && b1.k() != b2.k()))
        fail(ErrorKind::InvalidArgument, "perturbed_complex needs equal slopes");
    const int g = b1.genus();
    FloerComplex cx;
    cx.g = g;
    cx.by_degree.assign(static_cast<std::size_t>(g) + 1, {});
    cx.differential.resize(static_cast<std::size_t>(g));
    if (!same_mod_one(b1.b, b2.b)) {
        for (int w = 0; w < g; ++w) cx.differential[static_cast<std::size_t>(w)] = ComplexMatrix(0, 0);
        return cx;
    }

    const auto deltas = index_box(2, g);
    for (int w = 0; w <= g; ++w)
        for (const auto& dl : deltas) {
            int deg = 0;
            for (int v : dl) deg += v;
            if (deg != w) continue;
            RealVector r(g), th(g);
            for (int j = 0; j < g; ++j) {
                r[j] = wrap01(0.5 * dl[static_cast<std::size_t>(j)] + (b1.vertical() ? b1.b[j] : 0.0));
                th[j] = b1.vertical() ? 0.0 : wrap01(b1.b[j] - b1.k() * r[j]);
            }
            cx.by_degree[static_cast<std::size_t>(w)].push_back(cx.generators.size());
            cx.generators.push_back({GeneratorKind::Perturbed, dl, w, r, th});
        }

    std::vector<cplx> weight(static_cast<std::size_t>(g));
    for (int j = 0; j < g; ++j) {
        cplx pref = 1.0;
        if (!params.unit_prefactor && !b1.vertical()) {
            const cplx A = bigon_area(b1.tau, j, params);
            const double Ap = bigon_connection_term(b1.tau, j, params);
            pref = std::exp(2.0 * pi * I_unit * (A + Ap));
        }
        const double da = b2.a[j] - b1.a[j];
        weight[static_cast<std::size_t>(j)] = pref * (std::exp(pi * I_unit * da) - std::exp(-pi * I_unit * da));
    }

    for (int w = 0; w < g; ++w) {
        const auto& src = cx.by_degree[static_cast<std::size_t>(w)];
        const auto& dst = cx.by_degree[static_cast<std::size_t>(w) + 1];
        ComplexMatrix D = ComplexMatrix::Zero(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(src.size()));
        for (std::size_t ci = 0; ci < src.size(); ++ci) {
            const auto& p = cx.generators[src[ci]].key;
            for (std::size_t ri = 0; ri < dst.size(); ++ri) {
                const auto& q = cx.generators[dst[ri]].key;
                int flip = -1, below = 0, diffs = 0;
                for (int j = 0; j < g; ++j) {
                    const auto J = static_cast<std::size_t>(j);
                    if (p[J] != q[J]) {
                        ++diffs;
                        if (p[J] == 0) flip = j;
                    }
                }
                if (diffs != 1 || flip < 0) continue;
                for (int j = 0; j < flip; ++j) below += p[static_cast<std::size_t>(j)];
                D(static_cast<Eigen::Index>(ri), static_cast<Eigen::Index>(ci)) =
                    (below % 2 ? -1.0 : 1.0) * weight[static_cast<std::size_t>(flip)];
            }
        }
        cx.differential[static_cast<std::size_t>(w)] = D;
    }
    return cx;
}

/// Singular values above 1e-8·σ_max count toward the rank; an absolute floor of 1e-9 matches the
/// 1e-10 translate-equality tolerance (entries scale like 2π·Δa).
inline std::vector<long long> floer_cohomology_dims(const FloerComplex& cx) {
    const int g = cx.g;
    std::vector<long long> dims(static_cast<std::size_t>(g) + 1, 0);
    std::vector<int> rank(static_cast<std::size_t>(g), 0);
    for (int w = 0; w < g; ++w) rank[static_cast<std::size_t>(w)] = numerical_rank(cx.differential[static_cast<std::size_t>(w)], 1e-8, 1e-9);
    for (int w = 0; w <= g; ++w) {
        long long d = static_cast<long long>(cx.by_degree[static_cast<std::size_t>(w)].size());
        if (w < g) d -= rank[static_cast<std::size_t>(w)];
        if (w > 0) d -= rank[static_cast<std::size_t>(w) - 1];
        dims[static_cast<std::size_t>(w)] = d;
    }
    return dims;
}

/// max entry of ∂∘∂.
inline double differential_square_residual(const FloerComplex& cx) {
    double m = 0;
    for (int w = 0; w + 1 < cx.g; ++w) {
        const auto& d0 = cx.differential[static_cast<std::size_t>(w)];
        const auto& d1 = cx.differential[static_cast<std::size_t>(w) + 1];
        if (d0.size() == 0 || d1.size() == 0) continue;
        m = std::max(m, (d1 * d0).cwiseAbs().maxCoeff());
    }
    return m;
}

/// HF dimensions for any pair of branes.
inline std::vector<long long> floer_dims(const Brane& b1, const Brane& b2, const PerturbationParams& params = {}) {
    const int g = b1.genus();
    std::vector<long long> dims(static_cast<std::size_t>(g) + 1, 0);
    switch (pair_kind(b1, b2)) {
    case PairKind::Transverse: {
        const auto gens = intersection_points(b1, b2);
        for (const auto& x : gens) ++dims[static_cast<std::size_t>(x.degree)];
        return dims;
    }
    case PairKind::SlopeVertical:
        ++dims[static_cast<std::size_t>(slope_vertical_generator(b1, b2).degree)];
        return dims;
    case PairKind::VerticalSlope:
        ++dims[static_cast<std::size_t>(vertical_slope_generator(b1, b2).degree)];
        return dims;
    case PairKind::EqualSlope:
    case PairKind::VerticalVertical:
        return floer_cohomology_dims(perturbed_complex(b1, b2, params));
    }
    return dims;
}

// ---- triangles and μ² ----

struct SlopeTriple {
    int k12, k23, k13;
    long long N; // k12·k23·k13
};

inline SlopeTriple slope_triple(int k1, int k2, int k3) {
    if (k1 == k2 || k2 == k3 || k1 == k3) fail(ErrorKind::RepeatedSlopes, "slopes must be pairwise distinct");
    SlopeTriple t{k2 - k1, k3 - k2, k3 - k1, 0};
    t.N = static_cast<long long>(t.k12) * t.k23 * t.k13;
    return t;
}

/// S_m = k23(λ1 + b2 − b1) − k12(λ2 + b3 − b2) − k12·k23·m.
inline RealVector triangle_s(int k1, int k2, int k3, const MultiIndex& l1, const MultiIndex& l2, const RealVector& b1,
                             const RealVector& b2, const RealVector& b3, const MultiIndex& m) {
    const int k12 = k2 - k1, k23 = k3 - k2;
    const auto g = b1.size();
    RealVector s(g);
    for (Eigen::Index j = 0; j < g; ++j) {
        const auto J = static_cast<std::size_t>(j);
        s[j] = k23 * (l1[J] + b2[j] - b1[j]) - k12 * (l2[J] + b3[j] - b2[j]) - static_cast<double>(k12) * k23 * m[J];
    }
    return s;
}

/// Complexified area S_mᵀτS_m / (2·k12·k23·k13) of the m-th triangle.
inline cplx triangle_area(int k1, int k2, int k3, const MultiIndex& l1, const MultiIndex& l2, const RealVector& b1,
                          const RealVector& b2, const RealVector& b3, const MultiIndex& m, const SiegelPoint& tau) {
    const auto t = slope_triple(k1, k2, k3);
    if (t.N <= 0) fail(ErrorKind::InvalidSlopeTriple, "slope product must be positive");
    const RealVector s = triangle_s(k1, k2, k3, l1, l2, b1, b2, b3, m);
    return cplx{s.dot(tau.B() * s), s.dot(tau.Omega() * s)} / (2.0 * static_cast<double>(t.N));
}

namespace detail {

inline void check_composable(const FloerElement& e1, const FloerElement& e2) {
    require_same_modulus(e1.source.tau, e2.target.tau);
    require_same_modulus(e1.source.tau, e1.target.tau);
    if (!(e1.target == e2.source)) fail(ErrorKind::InvalidArgument, "elements are not composable (target != source)");
}

} // namespace detail

/// Zero element of CF(b1, b2) with all generator keys present.
inline FloerElement floer_zero(const Brane& b1, const Brane& b2) {
    FloerElement e{b1, b2, 0, {}, {}};
    if (pair_kind(b1, b2) == PairKind::Transverse) {
        e.degree = transverse_degree(b1.k(), b2.k(), b1.genus());
        for (const auto& idx : index_box(std::abs(b2.k() - b1.k()), b1.genus())) e.coeffs[idx] = 0.0;
    } else if (pair_kind(b1, b2) == PairKind::SlopeVertical) {
        e.coeffs[{}] = 0.0;
    } else if (pair_kind(b1, b2) == PairKind::VerticalSlope) {
        e.degree = b1.genus();
        e.coeffs[{}] = 0.0;
    }
    return e;
}

inline FloerElement floer_generator(const Brane& b1, const Brane& b2, const MultiIndex& key) {
    FloerElement e = floer_zero(b1, b2);
    if (!e.coeffs.count(key)) fail(ErrorKind::InvalidArgument, "generator key not valid for this pair");
    e.coeffs[key] = 1.0;
    return e;
}

/// D^w = ϑ[−S_w/N, k12(a3−a2) − k23(a2−a1)](Nτ, 0).
inline cplx triangle_constant(const SiegelPoint& tau, int k1, int k2, int k3, const MultiIndex& l1, const MultiIndex& l2,
                              const Brane& b1, const Brane& b2, const Brane& b3, const MultiIndex& w, double tol) {
    const auto t = slope_triple(k1, k2, k3);
    const double N = static_cast<double>(t.N);
    const RealVector s = triangle_s(k1, k2, k3, l1, l2, b1.b, b2.b, b3.b, w);
    const RealVector d = t.k12 * (b3.a - b2.a) - t.k23 * (b2.a - b1.a);
    return theta_constant(tau.scaled(N), ThetaChar{-s / N, d}, tol);
}

/// μ²(e2, e1) on CF(b2,b3) ⊗ CF(b1,b2) → CF(b1,b3); the arguments are passed in composition order (e1 first).
inline FloerElement mu2(const FloerElement& e1, const FloerElement& e2, double tol = structure_tol) {
    detail::check_composable(e1, e2);
    const Brane &b1 = e1.source, &b2 = e1.target, &b3 = e2.target;
    require_same_modulus(b1.tau, b3.tau);
    if (b1.vertical() || b2.vertical() || b3.vertical()) fail(ErrorKind::VerticalSlope, "use mu2_vertical");
    const int k1 = b1.k(), k2 = b2.k(), k3 = b3.k(), g = b1.genus();
    const auto t = slope_triple(k1, k2, k3);
    FloerElement out = floer_zero(b1, b3);
    if (e1.degree + e2.degree != out.degree) {
        out.note = "degree mismatch: " + std::to_string(e1.degree) + "+" + std::to_string(e2.degree) +
                   " != " + std::to_string(out.degree);
        return out;
    }
    const int K13 = std::abs(t.k13);
    for (const auto& [l1, c1] : e1.coeffs) {
        if (c1 == cplx{}) continue;
        for (const auto& [l2, c2] : e2.coeffs) {
            if (c2 == cplx{}) continue;
            for (const auto& w : index_box(K13, g)) {
                MultiIndex lq(static_cast<std::size_t>(g));
                for (std::size_t j = 0; j < lq.size(); ++j)
                    lq[j] = mod_floor(static_cast<long long>(l1[j]) + l2[j] + static_cast<long long>(t.k23) * w[j], K13);
                out.coeffs[lq] += c1 * c2 * triangle_constant(b1.tau, k1, k2, k3, l1, l2, b1, b2, b3, w, tol);
            }
        }
    }
    return out;
}

/// Term-by-term sum over the triangle family: Σ_m e^{2πi·area(m)} · holonomy(m), each triangle assigned
/// to its output corner. Intended as an oracle for mu2.
inline FloerElement mu2_triangle_sum(const FloerElement& e1, const FloerElement& e2, double tol = structure_tol) {
    detail::check_composable(e1, e2);
    const Brane &b1 = e1.source, &b2 = e1.target, &b3 = e2.target;
    const int k1 = b1.k(), k2 = b2.k(), k3 = b3.k(), g = b1.genus();
    const auto t = slope_triple(k1, k2, k3);
    FloerElement out = floer_zero(b1, b3);
    if (e1.degree + e2.degree != out.degree) return out;
    const SiegelPoint& tau = b1.tau;
    const int K13 = std::abs(t.k13);
    const double N = static_cast<double>(t.N);

    for (const auto& [l1, c1] : e1.coeffs) {
        if (c1 == cplx{}) continue;
        for (const auto& [l2, c2] : e2.coeffs) {
            if (c2 == cplx{}) continue;
            // m ranges over a box covering every residue class's truncation box
            const MultiIndex zero(static_cast<std::size_t>(g), 0);
            const RealVector s0 = triangle_s(k1, k2, k3, l1, l2, b1.b, b2.b, b3.b, zero);
            const double step = static_cast<double>(t.k12) * t.k23;
            ThetaChar probe{RealVector::Zero(g), RealVector::Zero(g)};
            const LatticeBox unit = truncation_radius(tau.scaled(N), probe, ComplexVector::Zero(g), tol);
            std::vector<long long> lo(static_cast<std::size_t>(g)), hi(static_cast<std::size_t>(g));
            for (int j = 0; j < g; ++j) {
                // −S_m/N = (step·m − S_0)/N, so m ≈ S_0/step ± (R+1)·N/|step|
                const double ctr = s0[j] / step;
                const double rad = (unit.radius + 1.0) * std::abs(N / step);
                lo[static_cast<std::size_t>(j)] = static_cast<long long>(std::floor(ctr - rad));
                hi[static_cast<std::size_t>(j)] = static_cast<long long>(std::ceil(ctr + rad));
            }
            MultiIndex m(static_cast<std::size_t>(g));
            for (int j = 0; j < g; ++j) m[static_cast<std::size_t>(j)] = static_cast<int>(lo[static_cast<std::size_t>(j)]);
            while (true) {
                // lifts of the three corners
                RealVector rp1(g), rp2(g), rq(g);
                MultiIndex lq(static_cast<std::size_t>(g));
                for (int j = 0; j < g; ++j) {
                    const auto J = static_cast<std::size_t>(j);
                    rp1[j] = (l1[J] + b2.b[j] - b1.b[j]) / t.k12;
                    rp2[j] = (l2[J] + b3.b[j] - b2.b[j]) / t.k23 + m[J];
                    const long long lraw = static_cast<long long>(l1[J]) + l2[J] + static_cast<long long>(t.k23) * m[J];
                    rq[j] = (lraw + b3.b[j] - b1.b[j]) / t.k13;
                    lq[J] = mod_floor(lraw, K13);
                }
                const cplx area = triangle_area(k1, k2, k3, l1, l2, b1.b, b2.b, b3.b, m, tau);
                const RealVector dq1 = rp1 - rq, d12 = rp2 - rp1, d2q = rq - rp2;
                const double hol = -(b3.a.dot(d2q) + b2.a.dot(d12) + b1.a.dot(dq1));
                out.coeffs[lq] += c1 * c2 * std::exp(2.0 * pi * I_unit * area) * unit_phase(hol);

                int j = g - 1;
                while (j >= 0 && m[static_cast<std::size_t>(j)] == hi[static_cast<std::size_t>(j)]) {
                    m[static_cast<std::size_t>(j)] = static_cast<int>(lo[static_cast<std::size_t>(j)]);
                    --j;
                }
                if (j < 0) break;
                ++m[static_cast<std::size_t>(j)];
            }
        }
    }
    return out;
}

/// e^{πiK b_xᵀτb_x} · e^{−2πi(Δa + K a_x)ᵀb_x} for the vertical brane v = (a_x, b_x).
inline cplx vertical_prefactor(const SiegelPoint& tau, int K, const RealVector& da, const Brane& v) {
    const double bBb = v.b.dot(tau.B() * v.b), bWb = v.b.dot(tau.Omega() * v.b);
    return unit_phase(0.5 * K * bBb - (da + K * v.a).dot(v.b)) * std::exp(-pi * K * bWb);
}

/// Vertical brane through the point z of V_τ, i.e. z = −a − τb (reduced).
inline Brane vertical_brane_at(const SiegelPoint& tau, const ComplexVector& z) {
    const RealVector b = -(tau.Omega_inv() * z.imag());
    const RealVector a = -z.real() - tau.B() * b;
    return Brane::vertical_at(tau, a, b);
}

/// μ² with a vertical brane at the end: CF(ℓ_{k2}, ℓ_∞) ⊗ CF(ℓ_{k1}, ℓ_{k2}) → CF(ℓ_{k1}, ℓ_∞), k1 < k2.
/// Coefficient e^{πiK b_xᵀτb_x} e^{−2πi(Δa + K a_x)ᵀb_x} ϑ[(λ+b2−b1)/K, Δa](Kτ, K z_x), K = k2 − k1, z_x = −a_x − τb_x.
inline FloerElement mu2_vertical(const FloerElement& e12, const FloerElement& e2v, double tol = structure_tol) {
    detail::check_composable(e12, e2v);
    const Brane &b1 = e12.source, &b2 = e12.target, &v = e2v.target;
    if (b1.vertical() || b2.vertical() || !v.vertical())
        fail(ErrorKind::InvalidArgument, "mu2_vertical needs (finite, finite, vertical) branes");
    const int k1 = b1.k(), k2 = b2.k(), g = b1.genus();
    if (k1 >= k2) fail(ErrorKind::SlopeOrderViolation, "mu2_vertical needs k1 < k2");
    const int K = k2 - k1;
    const SiegelPoint& tau = b1.tau;
    FloerElement out = floer_zero(b1, v);
    const cplx cv = e2v.coeff({});
    if (cv == cplx{}) return out;

    const RealVector da = b2.a - b1.a;
    const ComplexVector zx = v.evaluation_point();
    const cplx pref = vertical_prefactor(tau, K, da, v);
    const SiegelPoint tauK = tau.scaled(K);
    cplx acc = 0;
    for (const auto& [lam, c] : e12.coeffs) {
        if (c == cplx{}) continue;
        RealVector cc(g);
        for (int j = 0; j < g; ++j) cc[j] = (lam[static_cast<std::size_t>(j)] + b2.b[j] - b1.b[j]) / K;
        acc += c * theta_eval(tauK, static_cast<double>(K) * zx, ThetaChar{cc, da}, tol);
    }
    out.coeffs[{}] = cv * pref * acc;
    return out;
}

} // namespace abhms
