#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "multi_index.hpp"
#include "siegel.hpp"
#include "theta.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace abhms {

/// Class [z] ∈ ℂ^g/(ℤ^g + τℤ^g) through its canonical representative z = a + τb, a, b ∈ [0,1)^g.
/// For theta sections the same pair reads z = d + τc, i.e. a ↔ d and b ↔ c.
struct TorusPoint {
    SiegelPoint tau;
    RealVector a;
    RealVector b;

    ComplexVector z() const { return a.cast<cplx>() + tau.tau() * b.cast<cplx>(); }

    static TorusPoint origin(const SiegelPoint& tau) {
        return {tau, RealVector::Zero(tau.genus()), RealVector::Zero(tau.genus())};
    }

    /// Canonical point from real coordinates (reduced mod 1).
    static TorusPoint from_coords(const SiegelPoint& tau, const RealVector& a, const RealVector& b) {
        if (a.size() != tau.genus() || b.size() != tau.genus()) fail(ErrorKind::DimensionMismatch, "translate length");
        return {tau, wrap01(a), wrap01(b)};
    }
};

inline bool same_point(const TorusPoint& p, const TorusPoint& q, double tol = 1e-10) {
    return same_mod_one(p.a, q.a, tol) && same_mod_one(p.b, q.b, tol);
}

inline TorusPoint reduce_torus_point(const SiegelPoint& tau, const ComplexVector& z) {
    if (z.size() != tau.genus()) fail(ErrorKind::DimensionMismatch, "argument length must equal g");
    const RealVector b = tau.Omega_inv() * z.imag();
    const RealVector a = z.real() - tau.B() * b;
    return {tau, wrap01(a), wrap01(b)};
}

/// 𝓛^k ⊗ 𝕃_[z] labelled by its level and canonical translate.
struct LineBundleLabel {
    int level;
    TorusPoint translate;
};

/// Element of H⁰ (dual = false, level k ≥ 1) or of H^g at level −k in the dual basis (dual = true).
struct SectionVector {
    LineBundleLabel label;
    bool dual = false;
    std::map<MultiIndex, cplx> coeffs;

    int genus() const { return label.translate.tau.genus(); }
    int level() const { return label.level; }
    cplx coeff(const MultiIndex& idx) const {
        auto it = coeffs.find(idx);
        return it == coeffs.end() ? cplx{} : it->second;
    }

    static SectionVector zero(const LineBundleLabel& label, bool dual) {
        SectionVector s{label, dual, {}};
        for (auto& idx : index_box(label.level, label.translate.tau.genus())) s.coeffs[idx] = 0.0;
        return s;
    }
    static SectionVector basis(const LineBundleLabel& label, const MultiIndex& idx, bool dual = false) {
        SectionVector s = zero(label, dual);
        if (!in_box(idx, label.level)) fail(ErrorKind::InvalidArgument, "section index outside I_{g,k}");
        s.coeffs[idx] = 1.0;
        return s;
    }
};

inline double max_abs_coeff(const SectionVector& s) {
    double m = 0;
    for (const auto& [k, v] : s.coeffs) m = std::max(m, std::abs(v));
    return m;
}

// ---- sections ----

/// s_{k,z,λ}(u) = ϑ[(c+λ)/k, d](kτ, ku) where the translate is d + τc.
/// c and d may be any representatives; the canonical basis uses those of the label.
inline cplx section_value_raw(const SiegelPoint& tau, int k, const RealVector& c, const RealVector& d,
                              const MultiIndex& lambda, const ComplexVector& u, double tol = 1e-12) {
    if (k <= 0) fail(ErrorKind::LevelNotPositive, "section_value needs level k >= 1");
    const int g = tau.genus();
    if (static_cast<int>(lambda.size()) != g) fail(ErrorKind::DimensionMismatch, "index length must equal g");
    RealVector cc(g);
    for (int j = 0; j < g; ++j) cc[j] = (c[j] + lambda[j]) / k;
    return theta_eval(tau.scaled(k), static_cast<double>(k) * u, ThetaChar{cc, d}, tol);
}

inline cplx section_value(const LineBundleLabel& label, const MultiIndex& lambda, const ComplexVector& u,
                          double tol = 1e-12) {
    if (label.level <= 0) fail(ErrorKind::LevelNotPositive, "section_value needs level k >= 1");
    if (!in_box(lambda, label.level)) fail(ErrorKind::InvalidArgument, "section index outside I_{g,k}");
    return section_value_raw(label.translate.tau, label.level, label.translate.b, label.translate.a, lambda, u, tol);
}

/// Evaluates a non-dual section vector at u.
inline cplx section_value(const SectionVector& s, const ComplexVector& u, double tol = 1e-12) {
    if (s.dual) fail(ErrorKind::InvalidArgument, "dual classes have no pointwise values");
    cplx acc = 0;
    for (const auto& [idx, v] : s.coeffs)
        if (v != cplx{}) acc += v * section_value(s.label, idx, u, tol);
    return acc;
}

inline long long h0_dim(int k, int g) {
    if (k < 1) fail(ErrorKind::LevelNotPositive, "h0_dim needs k >= 1");
    return ipow(k, g);
}

/// Rewrites s_{k,(c,d),λ} for a representative (c,d) of the target translate (c0,d0):
/// with c = c0 + p, d = d0 + q integral, s_{k,(c,d),λ} = e^{2πi((c+λ)/k)ᵀq} · s_{k,(c0,d0),(λ+p) mod k}.
struct Rebased {
    cplx phase;
    MultiIndex index;
};

inline Rebased rebase_section(int k, const RealVector& c, const RealVector& d, const MultiIndex& lambda,
                              const RealVector& c0, const RealVector& d0) {
    const auto g = c.size();
    Rebased r{1.0, MultiIndex(static_cast<std::size_t>(g))};
    double phase = 0;
    for (Eigen::Index j = 0; j < g; ++j) {
        const double pj = std::round(c[j] - c0[j]), qj = std::round(d[j] - d0[j]);
        if (std::abs(c[j] - c0[j] - pj) > 1e-9 || std::abs(d[j] - d0[j] - qj) > 1e-9)
            fail(ErrorKind::ModulusMismatch, "translate is not a representative of the target class");
        phase += (c[j] + lambda[static_cast<std::size_t>(j)]) / k * qj;
        r.index[static_cast<std::size_t>(j)] =
            mod_floor(static_cast<long long>(lambda[static_cast<std::size_t>(j)]) + static_cast<long long>(pj), k);
    }
    r.phase = unit_phase(phase);
    return r;
}

// ---- dimensions ----

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// dim Ext^w(𝓛_{k,[z]}, 𝓛_{k',[z']}) for w = 0..g.
inline std::vector<long long> ext_dims(int k, int kp, const TorusPoint& z, const TorusPoint& zp, int g) {
    std::vector<long long> out(static_cast<std::size_t>(g) + 1, 0);
    if (kp > k) {
        out[0] = ipow(kp - k, g);
    } else if (kp < k) {
        out[static_cast<std::size_t>(g)] = ipow(k - kp, g);
    } else if (same_point(z, zp)) {
        for (int w = 0; w <= g; ++w) out[static_cast<std::size_t>(w)] = binomial(g, w);
    }
    return out;
}

/// Ext table from a line bundle to the skyscraper at a point: ℂ in degree 0.
inline std::vector<long long> ext_dims_line_to_point(int g) {
    std::vector<long long> out(static_cast<std::size_t>(g) + 1, 0);
    out[0] = 1;
    return out;
}

/// Ext table from a skyscraper to a line bundle: ℂ in degree g.
inline std::vector<long long> ext_dims_point_to_line(int g) {
    std::vector<long long> out(static_cast<std::size_t>(g) + 1, 0);
    out[static_cast<std::size_t>(g)] = 1;
    return out;
}

/// Ext between skyscrapers: Λ^w ℂ^g when the points agree, else zero.
inline std::vector<long long> ext_dims_point_to_point(const TorusPoint& p, const TorusPoint& q, int g) {
    std::vector<long long> out(static_cast<std::size_t>(g) + 1, 0);
    if (same_point(p, q))
        for (int w = 0; w <= g; ++w) out[static_cast<std::size_t>(w)] = binomial(g, w);
    return out;
}

struct LatticeSplit {
    MultiIndex n, ntilde, w;
};

/// Unique (n, ñ, w) with n' = n + k''ñ + w, n'' = n − k'ñ, w ∈ {0..k'+k''−1}^g.
inline LatticeSplit lattice_split(int kp, int kpp, const MultiIndex& np, const MultiIndex& npp) {
    if (kp < 1 || kpp < 1) fail(ErrorKind::LevelNotPositive, "lattice_split needs positive levels");
    if (np.size() != npp.size()) fail(ErrorKind::DimensionMismatch, "lattice vectors differ in length");
    const long long K = kp + kpp;
    LatticeSplit s{MultiIndex(np.size()), MultiIndex(np.size()), MultiIndex(np.size())};
    for (std::size_t j = 0; j < np.size(); ++j) {
        const long long diff = static_cast<long long>(np[j]) - npp[j];
        const long long q = div_floor(diff, K);
        s.ntilde[j] = static_cast<int>(q);
        s.w[j] = static_cast<int>(diff - K * q);
        s.n[j] = static_cast<int>(npp[j] + kp * q);
    }
    return s;
}

// ---- products ----

/// Term of the product expansion of basis sections at levels k', k'' and representatives (c',d'), (c'',d''):
/// s'_{λ'} s''_{λ''} = Σ_w coeff_w · s_{k'+k'', (c'+c'', d'+d''), λ'+λ''+k'w}.
struct ProductTerm {
    MultiIndex raw_index;
    cplx coeff;
};

/// Structure constant ϑ[(k'k''w + k''(c'+λ') − k'(c''+λ''))/(k'k''K), k''d' − k'd''](k'k''Kτ, 0).
inline cplx product_constant(const SiegelPoint& tau, int kp, int kpp, const RealVector& cp, const RealVector& dp,
                             const MultiIndex& lp, const RealVector& cpp, const RealVector& dpp, const MultiIndex& lpp,
                             const MultiIndex& w, double tol) {
    const int g = tau.genus();
    const double K = kp + kpp;
    const double denom = static_cast<double>(kp) * kpp * K;
    ThetaChar ch{RealVector(g), RealVector(g)};
    for (int j = 0; j < g; ++j) {
        const auto J = static_cast<std::size_t>(j);
        ch.c[j] = (static_cast<double>(kp) * kpp * w[J] + kpp * (cp[j] + lp[J]) - kp * (cpp[j] + lpp[J])) / denom;
        ch.d[j] = kpp * dp[j] - kp * dpp[j];
    }
    return theta_constant(tau.scaled(denom), ch, tol);
}

namespace detail {

inline void check_nondual_pair(const SectionVector& sp, const SectionVector& spp) {
    if (sp.dual || spp.dual) fail(ErrorKind::InvalidArgument, "multiply_sections expects H^0 elements");
    if (sp.level() < 1 || spp.level() < 1) fail(ErrorKind::LevelNotPositive, "levels must be >= 1");
    require_same_modulus(sp.label.translate.tau, spp.label.translate.tau);
}

/// Accumulates the product of two basis sections into out (canonical translate (c0,d0) at level K).
/// When only_index is given, structure constants landing elsewhere are skipped before evaluation.
inline void accumulate_basis_product(const SiegelPoint& tau, int kp, const RealVector& cp, const RealVector& dp,
                                     const MultiIndex& lp, int kpp, const RealVector& cpp, const RealVector& dpp,
                                     const MultiIndex& lpp, const RealVector& c0, const RealVector& d0, cplx weight,
                                     std::map<MultiIndex, cplx>& out, const MultiIndex* only_index, double tol) {
    const int g = tau.genus();
    const int K = kp + kpp;
    const RealVector c = cp + cpp, d = dp + dpp;
    for (const auto& w : index_box(K, g)) {
        MultiIndex raw(static_cast<std::size_t>(g));
        for (std::size_t j = 0; j < raw.size(); ++j) raw[j] = lp[j] + lpp[j] + kp * w[j];
        const Rebased rb = rebase_section(K, c, d, raw, c0, d0);
        if (only_index && rb.index != *only_index) continue;
        const cplx cst = product_constant(tau, kp, kpp, cp, dp, lp, cpp, dpp, lpp, w, tol);
        out[rb.index] += weight * cst * rb.phase;
    }
}

} // namespace detail

/// Product H⁰(𝓛_{k',[z']}) ⊗ H⁰(𝓛_{k'',[z'']}) → H⁰(𝓛_{k'+k'',[z'+z'']}) in the canonical bases.
inline SectionVector multiply_sections(const SectionVector& sp, const SectionVector& spp,
                                       double tol = structure_tol) {
    detail::check_nondual_pair(sp, spp);
    const SiegelPoint& tau = sp.label.translate.tau;
    const int kp = sp.level(), kpp = spp.level(), K = kp + kpp;
    const auto& tp = sp.label.translate;
    const auto& tpp = spp.label.translate;
    const TorusPoint target = TorusPoint::from_coords(tau, tp.a + tpp.a, tp.b + tpp.b);
    SectionVector out = SectionVector::zero({K, target}, false);
    for (const auto& [lp, vp] : sp.coeffs) {
        if (vp == cplx{}) continue;
        for (const auto& [lpp, vpp] : spp.coeffs) {
            if (vpp == cplx{}) continue;
            detail::accumulate_basis_product(tau, kp, tp.b, tp.a, lp, kpp, tpp.b, tpp.a, lpp, target.b, target.a,
                                             vp * vpp, out.coeffs, nullptr, tol);
        }
    }
    return out;
}

/// H⁰(𝓛_{k',[z']}) ⊗ H^g(𝓛_{−k'',[−z'']}) → H^g(𝓛_{−(k''−k'),[−(z''−z')]}), k' < k'', in the dual bases:
/// the coefficient on s^{k''−k', z''−z', λ} is the coefficient of s_{k'',z'',λ''} in s_{k',z',λ'}·s_{k''−k',z''−z',λ}.
inline SectionVector serre_dual_product(const SectionVector& sp, const SectionVector& sdual,
                                        double tol = structure_tol) {
    if (sp.dual || !sdual.dual) fail(ErrorKind::InvalidArgument, "serre_dual_product expects (H^0, H^g) inputs");
    if (sp.level() < 1 || sdual.level() < 1) fail(ErrorKind::LevelNotPositive, "levels must be >= 1");
    if (sp.level() >= sdual.level()) fail(ErrorKind::LevelOrderViolation, "need k' < k''");
    const SiegelPoint& tau = sp.label.translate.tau;
    require_same_modulus(tau, sdual.label.translate.tau);
    const int kp = sp.level(), kpp = sdual.level(), kq = kpp - kp;
    const int g = tau.genus();
    const auto& tp = sp.label.translate;
    const auto& tpp = sdual.label.translate;
    const TorusPoint quot = TorusPoint::from_coords(tau, tpp.a - tp.a, tpp.b - tp.b);
    SectionVector out = SectionVector::zero({kq, quot}, true);
    for (const auto& lambda : index_box(kq, g)) {
        cplx acc = 0;
        for (const auto& [lp, vp] : sp.coeffs) {
            if (vp == cplx{}) continue;
            for (const auto& [lpp, vpp] : sdual.coeffs) {
                if (vpp == cplx{}) continue;
                std::map<MultiIndex, cplx> tmp;
                detail::accumulate_basis_product(tau, kp, tp.b, tp.a, lp, kq, quot.b, quot.a, lambda, tpp.b, tpp.a, 1.0,
                                                 tmp, &lpp, tol);
                auto it = tmp.find(lpp);
                if (it != tmp.end()) acc += vp * vpp * it->second;
            }
        }
        out.coeffs[lambda] = acc;
    }
    return out;
}

/// Serre pairing H⁰(𝓛_{k,[z]}) ⊗ H^g(𝓛_{−k,[−z]}) → ℂ: the dual bases pair to δ.
inline cplx serre_pairing(const SectionVector& s, const SectionVector& sdual) {
    if (s.dual || !sdual.dual) fail(ErrorKind::InvalidArgument, "serre_pairing expects (H^0, H^g) inputs");
    if (s.level() != sdual.level()) fail(ErrorKind::LevelOrderViolation, "pairing needs equal levels");
    require_same_modulus(s.label.translate.tau, sdual.label.translate.tau);
    if (!same_point(s.label.translate, sdual.label.translate)) return 0.0;
    cplx acc = 0;
    for (const auto& [idx, v] : s.coeffs) acc += v * sdual.coeff(idx);
    return acc;
}

// ---- ring of sections ----

/// Dense coefficient tensor of H⁰(L^{d'}) ⊗ H⁰(L^{d''}) → H⁰(L^{d'+d''}) in lexicographic index order.
struct ProductBlock {
    int dp = 0, dpp = 0, g = 0;
    std::vector<cplx> data;

    std::size_t size_p() const { return static_cast<std::size_t>(ipow(dp, g)); }
    std::size_t size_pp() const { return static_cast<std::size_t>(ipow(dpp, g)); }
    std::size_t size_out() const { return static_cast<std::size_t>(ipow(dp + dpp, g)); }
    cplx& at(std::size_t ip, std::size_t ipp, std::size_t io) { return data[(ip * size_pp() + ipp) * size_out() + io]; }
    cplx at(std::size_t ip, std::size_t ipp, std::size_t io) const {
        return data[(ip * size_pp() + ipp) * size_out() + io];
    }
};

struct RingTable {
    int g = 0;
    int d_max = 0;
    std::map<std::pair<int, int>, ProductBlock> blocks;
};

inline RingTable ring_table(const SiegelPoint& tau, int d_max, double tol = structure_tol) {
    if (d_max < 2) fail(ErrorKind::InvalidArgument, "d_max must be >= 2");
    const int g = tau.genus();
    RingTable table{g, d_max, {}};
    const TorusPoint zero = TorusPoint::origin(tau);
    for (int dp = 1; dp < d_max; ++dp)
        for (int dpp = 1; dp + dpp <= d_max; ++dpp) {
            ProductBlock blk{dp, dpp, g, {}};
            blk.data.assign(blk.size_p() * blk.size_pp() * blk.size_out(), 0.0);
            const auto ip = index_box(dp, g), ipp = index_box(dpp, g);
            for (std::size_t i = 0; i < ip.size(); ++i)
                for (std::size_t j = 0; j < ipp.size(); ++j) {
                    const auto prod = multiply_sections(SectionVector::basis({dp, zero}, ip[i]),
                                                        SectionVector::basis({dpp, zero}, ipp[j]), tol);
                    for (const auto& [idx, v] : prod.coeffs) blk.at(i, j, linear_index(idx, dp + dpp)) = v;
                }
            table.blocks.emplace(std::make_pair(dp, dpp), std::move(blk));
        }
    return table;
}

} // namespace abhms
