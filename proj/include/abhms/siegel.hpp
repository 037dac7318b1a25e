#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "random.hpp"

#include <string>
#include <utility>
#include <vector>

namespace abhms {

inline constexpr int max_genus = 8;
inline constexpr double pd_tol = 1e-12;
inline constexpr double symmetrize_tol = 1e-13;

namespace detail {

inline RealMatrix symmetrized(const RealMatrix& m, const char* name) {
    const double asym = max_asymmetry(m);
    if (asym == 0.0) return m;
    if (asym >= symmetrize_tol)
        fail(ErrorKind::NotSymmetric, std::string(name) + " asymmetry " + std::to_string(asym));
    return 0.5 * (m + m.transpose());
}

/// Cholesky gate followed by the smallest eigenvalue; throws unless PD with margin pd_tol.
inline double checked_min_eigenvalue(const RealMatrix& omega) {
    Eigen::LLT<RealMatrix> llt(omega);
    if (llt.info() != Eigen::Success) fail(ErrorKind::NotPositiveDefinite, "Cholesky factorization failed");
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(omega, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()[0];
    if (!(lmin > pd_tol)) fail(ErrorKind::NotPositiveDefinite, "smallest eigenvalue " + std::to_string(lmin));
    return lmin;
}

inline void check_square(const RealMatrix& m, Eigen::Index g, const char* name) {
    if (m.rows() != g || m.cols() != g)
        fail(ErrorKind::DimensionMismatch, std::string(name) + " must be " + std::to_string(g) + "x" + std::to_string(g));
}

} // namespace detail

/// τ = B + iΩ in the Siegel upper half space. Immutable once built; caches Ω⁻¹ and λ_min(Ω).
class SiegelPoint {
public:
    int genus() const { return static_cast<int>(B_.rows()); }
    const RealMatrix& B() const { return B_; }
    const RealMatrix& Omega() const { return Omega_; }
    const RealMatrix& Omega_inv() const { return Omega_inv_; }
    double lambda_min() const { return lambda_min_; }
    ComplexMatrix tau() const { return B_.cast<cplx>() + I_unit * Omega_.cast<cplx>(); }

    /// kτ for k > 0, reusing the cached factorization data.
    SiegelPoint scaled(double k) const {
        if (!(k > 0)) fail(ErrorKind::InvalidArgument, "scale factor must be positive");
        SiegelPoint s = *this;
        s.B_ *= k;
        s.Omega_ *= k;
        s.Omega_inv_ /= k;
        s.lambda_min_ *= k;
        return s;
    }

    /// B Ω⁻¹, the B-field expressed against the fiber coordinates.
    RealMatrix b_field_ratio() const { return B_ * Omega_inv_; }

    bool operator==(const SiegelPoint& o) const { return B_ == o.B_ && Omega_ == o.Omega_; }

    friend SiegelPoint validate_siegel(const RealMatrix& B, const RealMatrix& Omega);

private:
    SiegelPoint() = default;
    RealMatrix B_, Omega_, Omega_inv_;
    double lambda_min_ = 0.0;
};

inline SiegelPoint validate_siegel(const RealMatrix& B, const RealMatrix& Omega) {
    const Eigen::Index g = Omega.rows();
    if (g < 1 || g > max_genus) fail(ErrorKind::DimensionMismatch, "genus must be in 1.." + std::to_string(max_genus));
    detail::check_square(Omega, g, "Omega");
    detail::check_square(B, g, "B");
    if (!B.allFinite() || !Omega.allFinite()) fail(ErrorKind::InvalidArgument, "non-finite entries");
    SiegelPoint p;
    p.B_ = detail::symmetrized(B, "B");
    p.Omega_ = detail::symmetrized(Omega, "Omega");
    p.lambda_min_ = detail::checked_min_eigenvalue(p.Omega_);
    p.Omega_inv_ = p.Omega_.llt().solve(RealMatrix::Identity(g, g));
    p.Omega_inv_ = 0.5 * (p.Omega_inv_ + p.Omega_inv_.transpose());
    return p;
}

inline SiegelPoint siegel_from_tau(const ComplexMatrix& tau) { return validate_siegel(tau.real(), tau.imag()); }

/// Ω alone, the tropical counterpart of a Siegel point.
class TropicalPoint {
public:
    explicit TropicalPoint(const RealMatrix& Omega) {
        const Eigen::Index g = Omega.rows();
        if (g < 1 || g > max_genus) fail(ErrorKind::DimensionMismatch, "genus out of range");
        detail::check_square(Omega, g, "Omega");
        Omega_ = detail::symmetrized(Omega, "Omega");
        lambda_min_ = detail::checked_min_eigenvalue(Omega_);
    }
    int genus() const { return static_cast<int>(Omega_.rows()); }
    const RealMatrix& Omega() const { return Omega_; }
    double lambda_min() const { return lambda_min_; }

private:
    RealMatrix Omega_;
    double lambda_min_;
};

/// Integer symplectic matrix [[A,B],[C,D]] with Mᵀ J M = J checked exactly.
class SymplecticIntMatrix {
public:
    SymplecticIntMatrix(IntMatrix A, IntMatrix B, IntMatrix C, IntMatrix D)
        : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
        const Eigen::Index g = A_.rows();
        for (const IntMatrix* m : {&A_, &B_, &C_, &D_})
            if (m->rows() != g || m->cols() != g) fail(ErrorKind::DimensionMismatch, "symplectic blocks must be g x g");
        if (!(full().transpose() * standard_j(static_cast<int>(g)) * full() == standard_j(static_cast<int>(g))))
            fail(ErrorKind::NotSymplectic, "M^T J M != J");
    }

    static SymplecticIntMatrix from_full(const IntMatrix& m) {
        const Eigen::Index g = m.rows() / 2;
        if (m.rows() != 2 * g || m.cols() != 2 * g || g < 1) fail(ErrorKind::DimensionMismatch, "need a 2g x 2g matrix");
        return {m.topLeftCorner(g, g), m.topRightCorner(g, g), m.bottomLeftCorner(g, g), m.bottomRightCorner(g, g)};
    }

    static IntMatrix standard_j(int g) {
        IntMatrix j = IntMatrix::Zero(2 * g, 2 * g);
        j.topRightCorner(g, g) = -IntMatrix::Identity(g, g);
        j.bottomLeftCorner(g, g) = IntMatrix::Identity(g, g);
        return j;
    }

    static SymplecticIntMatrix identity(int g) {
        return from_full(IntMatrix::Identity(2 * g, 2 * g));
    }

    /// J_g: A=0, B=−I, C=I, D=0.
    static SymplecticIntMatrix J(int g) { return from_full(standard_j(g)); }

    int genus() const { return static_cast<int>(A_.rows()); }
    const IntMatrix& A() const { return A_; }
    const IntMatrix& B() const { return B_; }
    const IntMatrix& C() const { return C_; }
    const IntMatrix& D() const { return D_; }

    IntMatrix full() const {
        const Eigen::Index g = A_.rows();
        IntMatrix m(2 * g, 2 * g);
        m << A_, B_, C_, D_;
        return m;
    }

    SymplecticIntMatrix operator*(const SymplecticIntMatrix& o) const { return from_full(full() * o.full()); }

private:
    IntMatrix A_, B_, C_, D_;
};

/// Inverse of a unimodular integer matrix, exact.
inline IntMatrix unimodular_inverse(const IntMatrix& A) {
    const auto det = int_determinant(A);
    if (det != 1 && det != -1) fail(ErrorKind::NotUnimodular, "determinant " + std::to_string(det));
    const RealMatrix inv = to_real(A).partialPivLu().inverse();
    IntMatrix r = inv.array().round().cast<std::int64_t>().matrix();
    if (!(A * r == IntMatrix::Identity(A.rows(), A.cols())))
        fail(ErrorKind::NotUnimodular, "inverse is not integral");
    return r;
}

/// Element [[A,B],[0,A^{-T}]] of the Siegel parabolic subgroup.
class ParabolicElement {
public:
    ParabolicElement(IntMatrix A, IntMatrix B) : A_(std::move(A)), B_(std::move(B)) {
        if (A_.rows() != A_.cols() || B_.rows() != A_.rows() || B_.cols() != A_.cols())
            fail(ErrorKind::DimensionMismatch, "parabolic blocks must be g x g");
        A_inv_t_ = unimodular_inverse(A_).transpose();
        if (!(A_ * B_.transpose() == B_ * A_.transpose())) fail(ErrorKind::NotSymplectic, "A B^T != B A^T");
    }
    const IntMatrix& A() const { return A_; }
    const IntMatrix& B() const { return B_; }
    SymplecticIntMatrix to_symplectic() const {
        const auto g = A_.rows();
        return {A_, B_, IntMatrix::Zero(g, g), A_inv_t_};
    }

private:
    IntMatrix A_, B_, A_inv_t_;
};

inline void require_same_modulus(const SiegelPoint& x, const SiegelPoint& y) {
    if (!(x == y)) fail(ErrorKind::ModulusMismatch, "objects live over different moduli");
}

inline void require_genus(int expected, int got) {
    if (expected != got) fail(ErrorKind::DimensionMismatch, "genus mismatch");
}

/// (Aτ+B)(Cτ+D)⁻¹.
inline SiegelPoint sp_act(const SymplecticIntMatrix& M, const SiegelPoint& tau) {
    require_genus(M.genus(), tau.genus());
    const ComplexMatrix t = tau.tau();
    const ComplexMatrix num = M.A().cast<double>().cast<cplx>() * t + M.B().cast<double>().cast<cplx>();
    const ComplexMatrix den = M.C().cast<double>().cast<cplx>() * t + M.D().cast<double>().cast<cplx>();
    Eigen::JacobiSVD<ComplexMatrix> svd(den);
    const auto& s = svd.singularValues();
    const double smin = s[s.size() - 1];
    if (!(smin > 0) || s[0] / smin > 1e14) fail(ErrorKind::SingularDenominator, "condition number above 1e14");
    // X = num · den⁻¹  ⇔  denᵀ Xᵀ = numᵀ
    const ComplexMatrix x = den.transpose().partialPivLu().solve(num.transpose()).transpose();
    const ComplexMatrix sym = 0.5 * (x + x.transpose());
    return siegel_from_tau(sym);
}

/// (Aτ+B)Aᵀ; equals sp_act through the block embedding.
inline SiegelPoint parabolic_act(const ParabolicElement& P, const SiegelPoint& tau) {
    require_genus(static_cast<int>(P.A().rows()), tau.genus());
    const RealMatrix A = to_real(P.A());
    const RealMatrix re = (A * tau.B() + to_real(P.B())) * A.transpose();
    const RealMatrix im = A * tau.Omega() * A.transpose();
    return validate_siegel(0.5 * (re + re.transpose()), 0.5 * (im + im.transpose()));
}

/// AΩAᵀ for |det A| = 1.
inline TropicalPoint gl_act(const IntMatrix& A, const TropicalPoint& omega) {
    require_genus(static_cast<int>(A.rows()), omega.genus());
    if (A.rows() != A.cols()) fail(ErrorKind::DimensionMismatch, "A must be square");
    const auto det = int_determinant(A);
    if (det != 1 && det != -1) fail(ErrorKind::NotUnimodular, "determinant " + std::to_string(det));
    const RealMatrix a = to_real(A);
    const RealMatrix r = a * omega.Omega() * a.transpose();
    return TropicalPoint(0.5 * (r + r.transpose()));
}

/// Membership in Sp(Ω, ℤ): AᵀΩD − CᵀΩB = Ω, AᵀΩC = CᵀΩA, BᵀΩD = DᵀΩB, each within 1e-10.
inline bool is_sp_omega(const IntMatrix& M, const TropicalPoint& omega) {
    const Eigen::Index g = omega.genus();
    if (M.rows() != 2 * g || M.cols() != 2 * g) fail(ErrorKind::DimensionMismatch, "need a 2g x 2g matrix");
    const RealMatrix m = to_real(M);
    const RealMatrix A = m.topLeftCorner(g, g), B = m.topRightCorner(g, g);
    const RealMatrix C = m.bottomLeftCorner(g, g), D = m.bottomRightCorner(g, g);
    const RealMatrix& W = omega.Omega();
    constexpr double tol = 1e-10;
    const double e1 = (A.transpose() * W * D - C.transpose() * W * B - W).cwiseAbs().maxCoeff();
    const double e2 = (A.transpose() * W * C - C.transpose() * W * A).cwiseAbs().maxCoeff();
    const double e3 = (B.transpose() * W * D - D.transpose() * W * B).cwiseAbs().maxCoeff();
    return e1 < tol && e2 < tol && e3 < tol;
}

// ---- sampling ----

/// B uniform in [−1,1] (symmetric), Ω = Q·diag(D)·Qᵀ with Q orthogonal from a Gaussian QR and D in [d_lo, d_hi].
inline SiegelPoint random_siegel(Rng& rng, int g, double d_lo = 0.8, double d_hi = 3.0) {
    RealMatrix B(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = i; j < g; ++j) B(i, j) = B(j, i) = rng.uniform(-1.0, 1.0);
    RealMatrix G(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) G(i, j) = rng.normal();
    const RealMatrix Q = Eigen::HouseholderQR<RealMatrix>(G).householderQ();
    RealVector D(g);
    for (int i = 0; i < g; ++i) D[i] = rng.uniform(d_lo, d_hi);
    RealMatrix W = Q * D.asDiagonal() * Q.transpose();
    W = 0.5 * (W + W.transpose());
    return validate_siegel(B, W);
}

/// Generators of Sp(2g,ℤ): J, elementary translations [[I,S],[0,I]], and [[E,0],[0,E^{-T}]] with E elementary.
inline std::vector<SymplecticIntMatrix> symplectic_generators(int g) {
    std::vector<SymplecticIntMatrix> gens;
    const IntMatrix Id = IntMatrix::Identity(g, g), Z = IntMatrix::Zero(g, g);
    gens.push_back(SymplecticIntMatrix::J(g));
    for (int i = 0; i < g; ++i)
        for (int j = i; j < g; ++j) {
            IntMatrix S = Z;
            S(i, j) = S(j, i) = 1;
            gens.emplace_back(Id, S, Z, Id);
        }
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            if (i == j) continue;
            IntMatrix E = Id;
            E(i, j) = 1;
            gens.push_back(ParabolicElement(E, Z).to_symplectic());
        }
    return gens;
}

/// Random word of the given length in the generators and their inverses.
inline std::vector<SymplecticIntMatrix> random_symplectic_word(Rng& rng, int g, int length) {
    const auto gens = symplectic_generators(g);
    std::vector<SymplecticIntMatrix> word;
    for (int i = 0; i < length; ++i) {
        const auto& s = gens[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(gens.size()) - 1))];
        if (rng.uniform() < 0.5) {
            word.push_back(s);
        } else {
            // inverse of a symplectic matrix: J⁻¹ Mᵀ J
            const IntMatrix J = SymplecticIntMatrix::standard_j(g);
            word.push_back(SymplecticIntMatrix::from_full(-J * s.full().transpose() * J));
        }
    }
    return word;
}

} // namespace abhms
