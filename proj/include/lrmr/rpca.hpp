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
/// \file rpca.hpp
///
/// Robust PCA, `D = X + Y` with `X` low rank and `Y` sparse.
///
///     AltProj:    Z_{k+1} = T_r(D - S_k)
///     AccAltProj: Z_{k+1} = T_r(P_{T_k}(D - S_k))
///     both:       S_{k+1} = H_{zeta_{k+1}}(D - Z_{k+1})
///
/// with `zeta_{k+1} = beta (sigma_{r+1} + gamma^{k+1} sigma_1)` taken from
/// the spectrum already computed for the rank-r step.
///
#ifndef LRMR_RPCA_HPP
#define LRMR_RPCA_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "lrmr/linalg.hpp"
#include "lrmr/report.hpp"

namespace lrmr
{

struct RpcaInstance
{
    Matrix D;
    Index r = 1;
    std::optional<Matrix> sparse_truth;
    std::optional<SvdTriple> lowrank_truth;
    std::uint64_t seed = 0;
};

struct ThresholdSchedule
{
    double beta = 0.0; ///< 0 selects 0.6 / sqrt(n)
    double gamma = 0.6;

    double resolved_beta(Index n) const
    {
        return beta > 0 ? beta : 0.6 / std::sqrt(static_cast<double>(n));
    }

    double zeta(Index n, std::size_t k, double sigma_r1, double sigma_1) const
    {
        return resolved_beta(n) *
               (sigma_r1 + std::pow(gamma, static_cast<double>(k)) * sigma_1);
    }
};

struct RpcaOptions
{
    double tol = 1e-9; ///< on ||D - Z - S||_F / ||D||_F
    std::size_t max_iters = 200;
    std::optional<Matrix> init_sparse; ///< S_0, zero by default
};

struct RpcaResult
{
    SvdTriple lowrank;
    Matrix sparse;
    /// Modelled flops of the rank-r stage, one entry per iteration.
    std::vector<double> svd_stage_flops;
};

///
/// `D = L R^T + Y` with standard Gaussian factors and `Y` supported on a
/// uniformly random `fraction` of the entries with magnitudes uniform in
/// `[lo, hi]` and random signs.
///
inline RpcaInstance generate_rpca(Index n, Index r, double fraction, std::uint64_t seed,
                                  double lo = 1.0, double hi = 2.0)
{
    require(n >= 2 && r >= 1 && r < n, ErrorCode::InvalidInput,
            "generate_rpca: need 1 <= r < n");
    require(fraction >= 0 && fraction <= 1 && lo >= 0 && hi >= lo, ErrorCode::InvalidInput,
            "generate_rpca: bad sparsity parameters");
    RpcaInstance P;
    P.r = r;
    P.seed = seed;
    Rng truth = derive_rng(seed, 0);
    const Matrix L = gaussian_matrix(n, r, truth);
    const Matrix R = gaussian_matrix(n, r, truth);
    const Matrix X = L * R.transpose();
    P.lowrank_truth = truncate_rank(X, r);

    Rng sp = derive_rng(seed, 1);
    const Index total = n * n;
    const Index count = static_cast<Index>(std::llround(fraction * static_cast<double>(total)));
    std::vector<Index> idx(total);
    for (Index k = 0; k < total; ++k)
        idx[k] = k;
    std::shuffle(idx.begin(), idx.end(), sp);
    std::uniform_real_distribution<double> mag(lo, hi);
    std::bernoulli_distribution sign(0.5);
    Matrix Y = Matrix::Zero(n, n);
    for (Index t = 0; t < count; ++t) {
        const double v = mag(sp);
        Y(idx[t] % n, idx[t] / n) = sign(sp) ? v : -v;
    }
    P.sparse_truth = Y;
    P.D = X + Y;
    return P;
}

namespace detail
{

inline void validate(const RpcaInstance &P, const RpcaOptions &o, const ThresholdSchedule &s)
{
    require(P.D.rows() >= 1 && P.D.cols() >= 1 && P.D.allFinite(), ErrorCode::InvalidInput,
            "rpca: D must be a finite nonempty matrix");
    require(P.r >= 1 && P.r < std::min(P.D.rows(), P.D.cols()), ErrorCode::InvalidRank,
            "rpca: need 1 <= r < min(rows, cols)");
    require(o.tol > 0 && o.max_iters >= 1, ErrorCode::InvalidOptions,
            "rpca: need tol > 0 and max_iters >= 1");
    require(s.beta >= 0 && s.gamma > 0 && s.gamma < 1, ErrorCode::InvalidOptions,
            "rpca: need beta >= 0 and gamma in (0, 1)");
    require(!o.init_sparse ||
                (o.init_sparse->rows() == P.D.rows() && o.init_sparse->cols() == P.D.cols()),
            ErrorCode::InvalidInput, "rpca: init_sparse must match D");
}

struct RpcaRun
{
    const RpcaInstance &P;
    const RpcaOptions &opts;
    SolverReport<RpcaResult> rep;
    Stopwatch clock;
    double dnorm;

    RpcaRun(const RpcaInstance &p, const RpcaOptions &o) : P(p), opts(o)
    {
        dnorm = P.D.norm();
        rep.estimate.sparse =
            o.init_sparse ? *o.init_sparse : Matrix::Zero(P.D.rows(), P.D.cols());
    }

    double error() const
    {
        if (!P.lowrank_truth)
            return std::numeric_limits<double>::quiet_NaN();
        const Matrix X = P.lowrank_truth->dense();
        return safe_ratio((rep.estimate.lowrank.dense() - X).norm(), X.norm());
    }

    /// Records iterate `k`; true when the residual meets the tolerance.
    bool record(std::size_t k)
    {
        const double rr = safe_ratio(
            (P.D - rep.estimate.lowrank.dense() - rep.estimate.sparse).norm(), dnorm);
        rep.trace.push_back({k, rr, error(), clock.elapsed_ms()});
        return rr <= opts.tol;
    }
};

} // namespace detail

/// Alternating projections with a full SVD per iteration.
inline SolverReport<RpcaResult> altproj_solve(const RpcaInstance &P,
                                              const ThresholdSchedule &sched = {},
                                              const RpcaOptions &opts = {})
{
    detail::validate(P, opts, sched);
    detail::RpcaRun run(P, opts);
    auto &est = run.rep.estimate;
    const Index n1 = P.D.rows(), n2 = P.D.cols();

    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        const SvdTriple full = compact_svd(P.D - est.sparse);
        est.lowrank = leading(full, P.r);
        est.svd_stage_flops.push_back(svd_flops(n1, n2));
        const double zeta = sched.zeta(std::min(n1, n2), k, full.sigma[P.r], full.sigma[0]);
        est.sparse = hard_threshold_entries(P.D - est.lowrank.dense(), zeta);
        if (run.record(k)) {
            run.rep.status = Status::Converged;
            return std::move(run.rep);
        }
    }
    run.rep.status = Status::MaxIters;
    return std::move(run.rep);
}

///
/// Tangent-space accelerated alternating projections. The first iteration
/// takes a full SVD of `D - S_0` to build `T_0`; afterwards the rank-r
/// step is the `2r x 2r` retraction of `P_{T_k}(D - S_k)`.
///
inline SolverReport<RpcaResult> accaltproj_solve(const RpcaInstance &P,
                                                 const ThresholdSchedule &sched = {},
                                                 const RpcaOptions &opts = {})
{
    detail::validate(P, opts, sched);
    detail::RpcaRun run(P, opts);
    auto &est = run.rep.estimate;
    const Index n1 = P.D.rows(), n2 = P.D.cols(), r = P.r;

    // T_0 from T_r(D - S_0).
    SvdTriple anchor = truncate_rank(P.D - est.sparse, r);
    double initial_flops = svd_flops(n1, n2);

    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        const TangentSpace T(anchor);
        const Matrix W = P.D - est.sparse;
        const auto res = retract_with_spectrum(T, project_tangent(T, W), r);
        est.lowrank = res.triple;
        est.svd_stage_flops.push_back(initial_flops + retract_flops(n1, n2, r, r));
        initial_flops = 0.0;
        const double s_r1 = res.core_sigma.size() > r ? res.core_sigma[r] : 0.0;
        const double zeta = sched.zeta(std::min(n1, n2), k, s_r1, res.core_sigma[0]);
        est.sparse = hard_threshold_entries(P.D - est.lowrank.dense(), zeta);
        anchor = est.lowrank;
        if (run.record(k)) {
            run.rep.status = Status::Converged;
            return std::move(run.rep);
        }
    }
    run.rep.status = Status::MaxIters;
    return std::move(run.rep);
}

} // namespace lrmr

#endif // LRMR_RPCA_HPP
