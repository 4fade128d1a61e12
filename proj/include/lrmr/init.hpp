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

// Spectral initialisations shared by the factored and manifold solvers.

#ifndef LRMR_INIT_HPP
#define LRMR_INIT_HPP

#include <cmath>

#include <Eigen/Eigenvalues>

#include "lrmr/linalg.hpp"
#include "lrmr/measurements.hpp"

namespace lrmr
{

/// `Z_0 = T_r(alpha A^*(y))`.
inline SvdTriple spectral_init(const ProblemInstance &P, double alpha, Index r)
{
    require(alpha > 0 && std::isfinite(alpha), ErrorCode::InvalidInput,
            "spectral_init: alpha must be positive");
    const Matrix G = alpha * adjoint(P.ensemble, P.y);
    return truncate_rank(G, r);
}

/// Spectral initialisation with the ensemble's default scaling.
inline SvdTriple spectral_init(const ProblemInstance &P)
{
    return spectral_init(P, spectral_scale(P.ensemble), P.r);
}

/// Norm given to the phase-retrieval starting vector.
enum class PhaseInitNorm
{
    /// `||z_0||^2 = ||y||_1 / m`, the sample mean of `(a^T x)^2`, which
    /// estimates `||x||^2`.
    Sqrt,
    /// `||z_0|| = ||y||_1 / m` taken literally. Overestimates `||x||` by a
    /// factor of about `||x||`; kept for comparison.
    Literal,
};

/// Leading eigenvector of `A^*(y) / m`, sign-normalised and rescaled.
inline Vector phase_spectral_init(const ProblemInstance &P,
                                  PhaseInitNorm norm = PhaseInitNorm::Sqrt)
{
    const auto &E = P.ensemble;
    require(E.model() == Model::PhaseRetrieval, ErrorCode::InvalidInput,
            "phase_spectral_init: phase retrieval ensemble required");
    const double m = static_cast<double>(E.m());
    const Matrix G = adjoint(E, P.y) / m;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
    Vector z = eig.eigenvectors().col(G.rows() - 1);
    Index imax = 0;
    z.cwiseAbs().maxCoeff(&imax);
    if (z[imax] < 0)
        z = -z;
    const double mean = P.y.cwiseAbs().sum() / m;
    return z * (norm == PhaseInitNorm::Sqrt ? std::sqrt(mean) : mean);
}

} // namespace lrmr

#endif // LRMR_INIT_HPP
