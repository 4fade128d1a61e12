// Copyright 2026 The lrmr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

///
/// \file linalg.hpp
///
/// Dense primitives shared by every solver: compact and truncated SVD,
/// singular value thresholding, entrywise hard thresholding, and the
/// tangent space machinery of the fixed-rank manifold.
///
/// All routines are templated on the scalar type so the Hankel solvers can
/// reuse them over `std::complex<double>`. Adjoints are conjugate
/// transposes throughout.
///
#ifndef LRMR_LINALG_HPP
#define LRMR_LINALG_HPP

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "lrmr/core.hpp"

namespace lrmr
{

///
/// Compact SVD factors `U * diag(sigma) * V^H`.
///
/// `U` and `V` have orthonormal columns, `sigma` is nonincreasing and
/// nonnegative. Each column of `U` is normalised so that its
/// largest-magnitude entry is real and positive (first index wins ties);
/// the matching column of `V` absorbs the conjugate phase.
///
template <typename Scalar>
struct SvdTripleT
{
    MatrixT<Scalar> U;
    Vector sigma;
    MatrixT<Scalar> V;

    Index rank() const { return sigma.size(); }
    Index rows() const { return U.rows(); }
    Index cols() const { return V.rows(); }

    MatrixT<Scalar> dense() const
    {
        return U * sigma.template cast<Scalar>().asDiagonal() * V.adjoint();
    }
};

using SvdTriple = SvdTripleT<double>;
using ComplexSvdTriple = SvdTripleT<Complex>;

/// Checks the structural invariants of an `SvdTripleT` at tolerance `tol`.
template <typename Scalar>
bool is_valid_svd(const SvdTripleT<Scalar> &s, double tol = kOrthoTol)
{
    const Index r = s.rank();
    if (s.U.cols() != r || s.V.cols() != r)
        return false;
    if (!s.U.allFinite() || !s.V.allFinite() || !s.sigma.allFinite())
        return false;
    for (Index i = 0; i < r; ++i) {
        if (s.sigma[i] < 0.0)
            return false;
        if (i > 0 && s.sigma[i] > s.sigma[i - 1])
            return false;
    }
    const auto I = MatrixT<Scalar>::Identity(r, r);
    return (s.U.adjoint() * s.U - I).norm() <= tol * std::max<double>(1, r) &&
           (s.V.adjoint() * s.V - I).norm() <= tol * std::max<double>(1, r);
}

namespace detail
{

template <typename Scalar>
Scalar unit_phase(const Scalar &x)
{
    if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
        const double a = std::abs(x);
        return a > 0 ? x / a : Scalar(1);
    } else {
        return x < 0 ? Scalar(-1) : Scalar(1);
    }
}

template <typename Scalar>
void canonicalize_signs(MatrixT<Scalar> &U, MatrixT<Scalar> &V)
{
    for (Index j = 0; j < U.cols(); ++j) {
        Index best = 0;
        double best_abs = -1.0;
        for (Index i = 0; i < U.rows(); ++i) {
            const double a = std::abs(U(i, j));
            if (a > best_abs) {
                best_abs = a;
                best = i;
            }
        }
        const Scalar phase = unit_phase(U(best, j));
        // U_j <- U_j * conj(phase); V_j <- V_j * conj(phase) keeps U S V^H
        U.col(j) *= Eigen::numext::conj(phase);
        V.col(j) *= Eigen::numext::conj(phase);
        if constexpr (Eigen::NumTraits<Scalar>::IsComplex)
            U(best, j) = Scalar(std::abs(U(best, j)), 0.0);
    }
}

} // namespace detail

///
/// Compact SVD of an arbitrary finite matrix. Returns `min(rows, cols)`
/// singular triplets in nonincreasing order.
///
template <typename Derived>
SvdTripleT<typename Derived::Scalar>
compact_svd(const Eigen::MatrixBase<Derived> &Z)
{
    using Scalar = typename Derived::Scalar;
    require(Z.rows() >= 1 && Z.cols() >= 1, ErrorCode::InvalidInput,
            "compact_svd: empty matrix");
    require(Z.allFinite(), ErrorCode::InvalidInput,
            "compact_svd: non-finite entries");

    const MatrixT<Scalar> A = Z;
    Eigen::BDCSVD<MatrixT<Scalar>> svd(A, Eigen::ComputeThinU |
                                              Eigen::ComputeThinV);
    SvdTripleT<Scalar> out;
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    out.sigma = svd.singularValues();
    detail::canonicalize_signs(out.U, out.V);
    return out;
}

/// Leading `r` triplets of a compact SVD.
template <typename Scalar>
SvdTripleT<Scalar> leading(const SvdTripleT<Scalar> &s, Index r)
{
    require(r >= 1 && r <= s.rank(), ErrorCode::InvalidRank,
            "leading: rank out of range");
    return {s.U.leftCols(r), s.sigma.head(r), s.V.leftCols(r)};
}

///
/// Best rank-`r` approximation `T_r(Z)` as compact factors.
///
/// Ties among singular values keep the first `r` in the order produced by
/// `compact_svd`.
///
template <typename Derived>
SvdTripleT<typename Derived::Scalar>
truncate_rank(const Eigen::MatrixBase<Derived> &Z, Index r)
{
    require(r >= 1 && r <= std::min(Z.rows(), Z.cols()), ErrorCode::InvalidRank,
            "truncate_rank: r must satisfy 1 <= r <= min(rows, cols)");
    return leading(compact_svd(Z), r);
}

///
/// Singular value thresholding `D_tau(Z) = sum max(sigma_i - tau, 0) u_i v_i^H`,
/// the proximity operator of `tau * ||.||_*`.
///
template <typename Derived>
MatrixT<typename Derived::Scalar> svt(const Eigen::MatrixBase<Derived> &Z,
                                      double tau)
{
    using Scalar = typename Derived::Scalar;
    require(tau >= 0.0 && std::isfinite(tau), ErrorCode::InvalidInput,
            "svt: tau must be a finite nonnegative number");
    require(Z.allFinite(), ErrorCode::InvalidInput, "svt: non-finite entries");
    if (tau == 0.0)
        return Z;
    const auto s = compact_svd(Z);
    Index keep = 0;
    while (keep < s.rank() && s.sigma[keep] > tau)
        ++keep;
    if (keep == 0)
        return MatrixT<Scalar>::Zero(Z.rows(), Z.cols());
    const Vector shrunk = s.sigma.head(keep).array() - tau;
    return s.U.leftCols(keep) * shrunk.cast<Scalar>().asDiagonal() *
           s.V.leftCols(keep).adjoint();
}

/// Nuclear norm, the sum of singular values.
template <typename Derived>
double nuclear_norm(const Eigen::MatrixBase<Derived> &Z)
{
    return compact_svd(Z).sigma.sum();
}

///
/// Entrywise hard thresholding `H_zeta`: keeps `Z_ij` where `|Z_ij| > zeta`
/// (strict) and zeroes everything else.
///
template <typename Derived>
MatrixT<typename Derived::Scalar>
hard_threshold_entries(const Eigen::MatrixBase<Derived> &Z, double zeta)
{
    using Scalar = typename Derived::Scalar;
    require(zeta >= 0.0, ErrorCode::InvalidInput,
            "hard_threshold_entries: zeta must be nonnegative");
    require(Z.allFinite(), ErrorCode::InvalidInput,
            "hard_threshold_entries: non-finite entries");
    MatrixT<Scalar> out = Z;
    for (Index j = 0; j < out.cols(); ++j)
        for (Index i = 0; i < out.rows(); ++i)
            if (!(std::abs(out(i, j)) > zeta))
                out(i, j) = Scalar(0);
    return out;
}

//------------------------------------------------------------------------------
// Tangent spaces of the fixed-rank manifold
//------------------------------------------------------------------------------

///
/// Tangent space `T = { U B^H + C V^H }` at a rank-r point with column
/// space `U` and row space `V`.
///
template <typename Scalar>
struct TangentSpaceT
{
    MatrixT<Scalar> U;
    MatrixT<Scalar> V;

    TangentSpaceT() = default;
    TangentSpaceT(MatrixT<Scalar> u, MatrixT<Scalar> v)
        : U(std::move(u)), V(std::move(v))
    {
        require(U.cols() == V.cols() && U.cols() >= 1, ErrorCode::InvalidInput,
                "TangentSpace: U and V must have the same positive width");
    }

    explicit TangentSpaceT(const SvdTripleT<Scalar> &at) : TangentSpaceT(at.U, at.V)
    {
    }

    Index rank() const { return U.cols(); }
    Index rows() const { return U.rows(); }
    Index cols() const { return V.rows(); }
};

/// A tangent vector `W = U B^H + C V^H`, stored by its factors.
template <typename Scalar>
struct TangentVectorT
{
    MatrixT<Scalar> B; // cols x r
    MatrixT<Scalar> C; // rows x r

    TangentVectorT &operator+=(const TangentVectorT &o)
    {
        B += o.B;
        C += o.C;
        return *this;
    }
    TangentVectorT &operator*=(Scalar a)
    {
        B *= a;
        C *= a;
        return *this;
    }
};

using TangentSpace = TangentSpaceT<double>;
using TangentVector = TangentVectorT<double>;

template <typename Scalar>
TangentVectorT<Scalar> operator+(TangentVectorT<Scalar> a,
                                 const TangentVectorT<Scalar> &b)
{
    return a += b;
}

template <typename Scalar>
TangentVectorT<Scalar> operator*(Scalar s, TangentVectorT<Scalar> a)
{
    return a *= s;
}

template <typename Scalar>
MatrixT<Scalar> densify(const TangentSpaceT<Scalar> &T,
                        const TangentVectorT<Scalar> &W)
{
    return T.U * W.B.adjoint() + W.C * T.V.adjoint();
}

///
/// Orthogonal projection onto `T`:
/// `P_T(Z) = U U^H Z + Z V V^H - U U^H Z V V^H`, encoded as
/// `B = Z^H U`, `C = (I - U U^H) Z V`.
///
template <typename Scalar, typename Derived>
TangentVectorT<Scalar> project_tangent(const TangentSpaceT<Scalar> &T,
                                       const Eigen::MatrixBase<Derived> &Z)
{
    require(Z.rows() == T.rows() && Z.cols() == T.cols(),
            ErrorCode::InvalidInput, "project_tangent: dimension mismatch");
    TangentVectorT<Scalar> W;
    W.B = Z.adjoint() * T.U;
    const MatrixT<Scalar> ZV = Z * T.V;
    W.C = ZV - T.U * (T.U.adjoint() * ZV);
    return W;
}

///
/// Same projection, given only the products `Z V` and `Z^H U`. Lets
/// callers with structured `Z` (sparse, Hankel) avoid forming it.
///
template <typename Scalar>
TangentVectorT<Scalar> project_tangent_from_products(const TangentSpaceT<Scalar> &T,
                                                     MatrixT<Scalar> ZV,
                                                     MatrixT<Scalar> ZhU)
{
    TangentVectorT<Scalar> W;
    W.C = ZV - T.U * (T.U.adjoint() * ZV);
    W.B = std::move(ZhU);
    return W;
}

/// Frobenius inner product `Re <A, B>` of two tangent vectors at the same `T`.
template <typename Scalar>
double tangent_inner(const TangentSpaceT<Scalar> &T, const TangentVectorT<Scalar> &a,
                     const TangentVectorT<Scalar> &b)
{
    // tr(A^H B) with A = U Ba^H + Ca V^H, B = U Bb^H + Cb V^H
    const Scalar t1 = (b.B.adjoint() * a.B).trace();
    const Scalar t2 = (a.C.adjoint() * b.C).trace();
    const Scalar t3 = ((T.V.adjoint() * a.B) * (T.U.adjoint() * b.C)).trace();
    const Scalar t4 =
        ((T.U.adjoint() * a.C).adjoint() * (b.B.adjoint() * T.V)).trace();
    return std::real(t1 + t2 + t3 + t4);
}

/// Retraction output plus the full spectrum of the `2r x 2r` core.
template <typename Scalar>
struct RetractionResult
{
    SvdTripleT<Scalar> triple;
    Vector core_sigma;
    bool used_core = false;
};

namespace detail
{

/// Columns of an orthonormal basis completing `Basis` towards `Extra`.
/// Householder QR of `[Basis, Extra]`; the trailing columns are orthogonal
/// to `Basis` even when `Extra` is rank deficient.
template <typename Scalar>
MatrixT<Scalar> complement_basis(const MatrixT<Scalar> &Basis,
                                 const MatrixT<Scalar> &Extra)
{
    const Index n = Basis.rows();
    const Index k = Basis.cols() + Extra.cols();
    MatrixT<Scalar> stacked(n, k);
    stacked << Basis, Extra;
    Eigen::HouseholderQR<MatrixT<Scalar>> qr(stacked);
    const MatrixT<Scalar> Q =
        qr.householderQ() * MatrixT<Scalar>::Identity(n, k);
    return Q.rightCols(Extra.cols());
}

} // namespace detail

///
/// Best rank-`r` approximation of the tangent vector `W` anchored at `T`,
/// computed through QR of the complement factors and the SVD of a
/// `2k x 2k` core (`k = T.rank()`). Cost is `O(n k^2 + k^3)`.
///
/// Falls back to a dense truncated SVD when `2k` exceeds either dimension.
///
template <typename Scalar>
RetractionResult<Scalar> retract_with_spectrum(const TangentSpaceT<Scalar> &T,
                                               const TangentVectorT<Scalar> &W,
                                               Index r)
{
    const Index n1 = T.rows(), n2 = T.cols(), k = T.rank();
    require(r >= 1 && r <= std::min(n1, n2), ErrorCode::InvalidRank,
            "retract: r out of range");
    require(W.B.rows() == n2 && W.B.cols() == k && W.C.rows() == n1 &&
                W.C.cols() == k,
            ErrorCode::InvalidInput, "retract: tangent vector not anchored at T");

    RetractionResult<Scalar> out;
    if (2 * k > std::min(n1, n2) || r > 2 * k) {
        auto full = compact_svd(densify(T, W));
        out.core_sigma = full.sigma;
        out.triple = leading(full, r);
        return out;
    }

    const MatrixT<Scalar> M1 = T.V.adjoint() * W.B; // k x k
    const MatrixT<Scalar> M2 = T.U.adjoint() * W.C; // k x k
    const MatrixT<Scalar> Bperp = W.B - T.V * M1;
    const MatrixT<Scalar> Cperp = W.C - T.U * M2;

    const MatrixT<Scalar> Q1 = detail::complement_basis(T.V, Bperp);
    const MatrixT<Scalar> Q2 = detail::complement_basis(T.U, Cperp);
    const MatrixT<Scalar> R1 = Q1.adjoint() * Bperp;
    const MatrixT<Scalar> R2 = Q2.adjoint() * Cperp;

    MatrixT<Scalar> core(2 * k, 2 * k);
    core.topLeftCorner(k, k) = M1.adjoint() + M2;
    core.topRightCorner(k, k) = R1.adjoint();
    core.bottomLeftCorner(k, k) = R2;
    core.bottomRightCorner(k, k).setZero();

    Eigen::JacobiSVD<MatrixT<Scalar>> svd(core, Eigen::ComputeFullU |
                                                    Eigen::ComputeFullV);
    out.core_sigma = svd.singularValues();
    out.used_core = true;

    MatrixT<Scalar> left(n1, 2 * k), right(n2, 2 * k);
    left << T.U, Q2;
    right << T.V, Q1;
    out.triple.U = left * svd.matrixU().leftCols(r);
    out.triple.V = right * svd.matrixV().leftCols(r);
    out.triple.sigma = out.core_sigma.head(r);
    detail::canonicalize_signs(out.triple.U, out.triple.V);
    return out;
}

template <typename Scalar>
SvdTripleT<Scalar> retract(const TangentSpaceT<Scalar> &T,
                           const TangentVectorT<Scalar> &W, Index r)
{
    return retract_with_spectrum(T, W, r).triple;
}

/// Tangent vector representing the anchor point `U diag(sigma) V^H` itself.
template <typename Scalar>
TangentVectorT<Scalar> anchor_vector(const SvdTripleT<Scalar> &Z)
{
    TangentVectorT<Scalar> W;
    W.B = Z.V * Z.sigma.template cast<Scalar>().asDiagonal();
    W.C = MatrixT<Scalar>::Zero(Z.U.rows(), Z.U.cols());
    return W;
}

//------------------------------------------------------------------------------
// Flop models (used for instrumentation only)
//------------------------------------------------------------------------------

/// Thin SVD with both factors of an m x n matrix (Golub-Van Loan R-SVD model).
inline double svd_flops(Index m, Index n)
{
    const double a = static_cast<double>(std::max(m, n));
    const double b = static_cast<double>(std::min(m, n));
    return 4.0 * a * a * b + 8.0 * a * b * b + 9.0 * b * b * b;
}

/// Householder QR of an m x n matrix (m >= n) including the thin Q.
inline double qr_flops(Index m, Index n)
{
    const double a = static_cast<double>(m), b = static_cast<double>(n);
    return 2.0 * (2.0 * a * b * b - 2.0 * b * b * b / 3.0);
}

/// Cost of `retract_with_spectrum` on an n1 x n2 tangent space of rank k.
inline double retract_flops(Index n1, Index n2, Index k, Index r)
{
    return qr_flops(n1, 2 * k) + qr_flops(n2, 2 * k) + svd_flops(2 * k, 2 * k) +
           2.0 * (n1 + n2) * (2 * k) * r;
}

} // namespace lrmr

#endif // LRMR_LINALG_HPP
