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
/// \file manifold.hpp
///
/// Hard thresholding and Riemannian methods on the rank-r manifold:
///
/// - `iht_solve`: `Z_{k+1} = T_r(Z_k + alpha_k G_k)` with
///   `G_k = A^*(y - A(Z_k))`.
/// - `rgrad_solve`: `Z_{k+1} = T_r(Z_k + alpha_k P_{T_k}(G_k))`, retracted
///   through the `2r x 2r` core.
/// - `rcg_solve`: the same with conjugate directions.
/// - `rgrad_phase`: rank-one PSD variant for phase retrieval.
///
#ifndef LRMR_MANIFOLD_HPP
#define LRMR_MANIFOLD_HPP

#include <cmath>
#include <functional>
#include <optional>

#include <Eigen/Eigenvalues>

#include "lrmr/init.hpp"
#include "lrmr/linalg.hpp"
#include "lrmr/measurements.hpp"
#include "lrmr/report.hpp"

namespace lrmr
{

enum class StepRule
{
    Constant, ///< alpha_k = alpha
    Niht,     ///< exact line search along the column subspace U U^T G
    Exact,    ///< exact line search along the search direction
};

enum class CgBeta
{
    None,
    PolakRibierePlus,
    FletcherReeves,
};

/// Passed to the observer after each accepted iteration.
struct ManifoldIterate
{
    std::size_t iter = 0;
    const SvdTriple &prev;
    const SvdTriple &next;
    double alpha = 0.0;
};

struct ManifoldOptions
{
    StepRule step = StepRule::Exact;
    double alpha = 1.0; ///< Constant rule
    CgBeta cg_beta = CgBeta::PolakRibierePlus;
    double tol = 1e-6;
    std::size_t max_iters = 1000;
    /// RIP estimate for the degenerate-stepsize fallback `1 / (2 (1 + delta))`.
    std::optional<double> rip_delta;
    /// Starting point; defaults to `spectral_init`.
    std::optional<SvdTriple> init;
    PhaseInitNorm phase_init = PhaseInitNorm::Sqrt;
    bool track_error = true;
    std::function<void(const ManifoldIterate &)> observer;
};

namespace detail
{

inline void validate(const ManifoldOptions &o)
{
    require(o.tol > 0 && o.max_iters >= 1, ErrorCode::InvalidOptions,
            "manifold: need tol > 0 and max_iters >= 1");
    require(o.step != StepRule::Constant || (o.alpha > 0 && std::isfinite(o.alpha)),
            ErrorCode::InvalidOptions, "manifold: constant step must be positive");
}

inline double fallback_step(const ManifoldOptions &o)
{
    return o.rip_delta ? 1.0 / (2.0 * (1.0 + *o.rip_delta)) : 0.5;
}

inline double step_ratio(double num, double den)
{
    if (num == 0.0)
        return 0.0;
    if (!(den > 0.0) || !std::isfinite(num / den))
        throw Error(ErrorCode::StepsizeDegenerate, "stepsize denominator vanished");
    return num / den;
}

inline SvdTriple starting_point(const ProblemInstance &P, const ManifoldOptions &o)
{
    SvdTriple Z = o.init ? *o.init : spectral_init(P);
    require(Z.rank() == P.r && Z.rows() == P.n() && Z.cols() == P.n(),
            ErrorCode::InvalidInput, "manifold: initial point must be n x n of rank r");
    return Z;
}

} // namespace detail

/// `A(U B^T + C V^T)`; sampled from the factors for completion.
inline Vector forward_tangent(const MeasurementEnsemble &E, const TangentSpace &T,
                              const TangentVector &W)
{
    if (E.model() == Model::Completion) {
        const auto &c = E.completion();
        Vector y(E.m());
        for (Index l = 0; l < y.size(); ++l) {
            const Index i = c.rows[l], j = c.cols[l];
            y[l] = T.U.row(i).dot(W.B.row(j)) + W.C.row(i).dot(T.V.row(j));
        }
        return y;
    }
    return forward(E, densify(T, W));
}

/// Projects a tangent vector at `from` onto the tangent space `to`.
inline TangentVector transport(const TangentSpace &to, const TangentSpace &from,
                               const TangentVector &W)
{
    Matrix WV = from.U * (W.B.transpose() * to.V) + W.C * (from.V.transpose() * to.V);
    Matrix WtU = W.B * (from.U.transpose() * to.U) + from.V * (W.C.transpose() * to.U);
    return project_tangent_from_products(to, std::move(WV), std::move(WtU));
}

///
/// Exact line search `<D, P_T G> / ||A(D)||^2` for `||A(Z + alpha D) - y||^2`
/// along a tangent direction `D`. With `D = P_T(G)` this is the RGrad
/// stepsize `||P_T G||_F^2 / ||A(P_T G)||^2`.
///
/// Partially observed completion works on the factors. Every other ensemble
/// densifies the direction, so for an isometric ensemble numerator and
/// denominator sum identical terms in identical order and the ratio is
/// exactly 1.
///
inline double tangent_line_search(const MeasurementEnsemble &E, const TangentSpace &T,
                                  const TangentVector &D, const TangentVector &PG)
{
    if (E.model() == Model::Completion && !E.is_full_observation()) {
        const double num = tangent_inner(T, D, PG);
        return detail::step_ratio(num, forward_tangent(E, T, D).squaredNorm());
    }
    const Matrix Wd = densify(T, D);
    const double num = &D == &PG ? Wd.cwiseProduct(Wd).sum()
                                 : Wd.cwiseProduct(densify(T, PG)).sum();
    return detail::step_ratio(num, forward(E, Wd).cwiseAbs2().sum());
}

inline double rgrad_stepsize(const MeasurementEnsemble &E, const TangentSpace &T,
                             const TangentVector &PG)
{
    return tangent_line_search(E, T, PG, PG);
}

/// NIHT stepsize `||U U^T G||_F^2 / ||A(U U^T G)||^2`.
inline double niht_stepsize(const MeasurementEnsemble &E, const Matrix &U,
                            const AdjointImage &G)
{
    const Matrix W = U * G.transpose_times(U).transpose();
    return detail::step_ratio(W.cwiseProduct(W).sum(), forward(E, W).cwiseAbs2().sum());
}

/// Full-gradient exact line search `||G||_F^2 / ||A(G)||^2`.
inline double gradient_stepsize(const MeasurementEnsemble &E, const AdjointImage &G)
{
    const Matrix W = G.dense();
    return detail::step_ratio(W.cwiseProduct(W).sum(), forward(E, W).cwiseAbs2().sum());
}

namespace detail
{

/// Shared bookkeeping for the matrix-valued manifold solvers.
struct ManifoldRun
{
    const ProblemInstance &P;
    const ManifoldOptions &opts;
    SolverReport<SvdTriple> rep;
    Stopwatch clock;
    Vector resid; // y - A(Z)
    double ynorm = 0.0;
    double initial = 0.0;

    ManifoldRun(const ProblemInstance &p, const ManifoldOptions &o) : P(p), opts(o)
    {
        validate(o);
        require(P.model != Model::PhaseRetrieval, ErrorCode::InvalidInput,
                "manifold: use rgrad_phase for phase retrieval");
        ynorm = P.y.norm();
        rep.estimate = starting_point(P, o);
        resid = P.y - forward(P.ensemble, rep.estimate);
        record(0);
        initial = rep.trace.front().rel_residual;
    }

    double error() const
    {
        return opts.track_error ? relative_error(P, rep.estimate.dense())
                                : std::numeric_limits<double>::quiet_NaN();
    }

    void record(std::size_t k)
    {
        rep.trace.push_back({k, safe_ratio(resid.norm(), ynorm), error(), clock.elapsed_ms()});
    }

    bool converged_at_start()
    {
        if (rep.trace.back().rel_residual <= opts.tol) {
            rep.status = Status::Converged;
            return true;
        }
        return false;
    }

    /// Accepts `next` as iterate `k`; returns true when the run should stop.
    bool accept(std::size_t k, SvdTriple next, double alpha)
    {
        if (opts.observer)
            opts.observer(ManifoldIterate{k, rep.estimate, next, alpha});
        rep.estimate = std::move(next);
        resid = P.y - forward(P.ensemble, rep.estimate);
        record(k);
        const double rr = rep.trace.back().rel_residual;
        if (!std::isfinite(rr) || rr > 1e6 * std::max(initial, 1e-300)) {
            rep.status = Status::Diverged;
            return true;
        }
        if (rr <= opts.tol) {
            rep.status = Status::Converged;
            return true;
        }
        return false;
    }
};

template <typename F>
double guarded_step(const ManifoldOptions &o, F &&compute)
{
    try {
        return compute();
    } catch (const Error &e) {
        if (e.code() != ErrorCode::StepsizeDegenerate)
            throw;
        return fallback_step(o);
    }
}

} // namespace detail

///
/// Iterative hard thresholding. `StepRule::Niht` uses the column-subspace
/// line search, `StepRule::Exact` the full-gradient line search.
///
inline SolverReport<SvdTriple> iht_solve(const ProblemInstance &P,
                                         const ManifoldOptions &opts)
{
    detail::ManifoldRun run(P, opts);
    if (run.converged_at_start())
        return std::move(run.rep);
    const auto &E = P.ensemble;
    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        const SvdTriple &Z = run.rep.estimate;
        const AdjointImage G(E, run.resid);
        const double alpha = detail::guarded_step(opts, [&] {
            switch (opts.step) {
            case StepRule::Constant: return opts.alpha;
            case StepRule::Niht: return niht_stepsize(E, Z.U, G);
            case StepRule::Exact: return gradient_stepsize(E, G);
            }
            return opts.alpha;
        });
        Matrix next = Z.dense() + alpha * G.dense();
        if (run.accept(k, truncate_rank(next, P.r), alpha))
            return std::move(run.rep);
    }
    run.rep.status = Status::MaxIters;
    return std::move(run.rep);
}

namespace detail
{

inline TangentVector riemannian_gradient(const TangentSpace &T, const AdjointImage &G)
{
    return project_tangent_from_products(T, G.times(T.V), G.transpose_times(T.U));
}

inline double manifold_step(const ManifoldOptions &opts, const MeasurementEnsemble &E,
                            const TangentSpace &T, const TangentVector &D,
                            const TangentVector &PG, const AdjointImage &G)
{
    return guarded_step(opts, [&] {
        switch (opts.step) {
        case StepRule::Constant: return opts.alpha;
        case StepRule::Niht: return niht_stepsize(E, T.U, G);
        case StepRule::Exact: return tangent_line_search(E, T, D, PG);
        }
        return opts.alpha;
    });
}

} // namespace detail

/// Riemannian gradient descent on the rank-r manifold.
inline SolverReport<SvdTriple> rgrad_solve(const ProblemInstance &P,
                                           const ManifoldOptions &opts)
{
    detail::ManifoldRun run(P, opts);
    if (run.converged_at_start())
        return std::move(run.rep);
    const auto &E = P.ensemble;
    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        const SvdTriple &Z = run.rep.estimate;
        const TangentSpace T(Z);
        const AdjointImage G(E, run.resid);
        const TangentVector PG = detail::riemannian_gradient(T, G);
        const double alpha = detail::manifold_step(opts, E, T, PG, PG, G);
        if (alpha == 0.0) {
            run.rep.status = Status::MaxIters;
            return std::move(run.rep);
        }
        TangentVector W = anchor_vector(Z) + alpha * PG;
        if (run.accept(k, retract(T, W, P.r), alpha))
            return std::move(run.rep);
    }
    run.rep.status = Status::MaxIters;
    return std::move(run.rep);
}

///
/// Riemannian conjugate gradients. The previous direction is moved to the
/// new tangent space by orthogonal projection; `beta` is clamped at zero and
/// the direction resets to the gradient when `<P_k, G_k> <= 0`.
///
inline SolverReport<SvdTriple> rcg_solve(const ProblemInstance &P,
                                         const ManifoldOptions &opts)
{
    require(opts.cg_beta != CgBeta::None, ErrorCode::InvalidOptions,
            "rcg_solve: cg_beta must not be None");
    detail::ManifoldRun run(P, opts);
    if (run.converged_at_start())
        return std::move(run.rep);
    const auto &E = P.ensemble;

    std::optional<TangentSpace> prevT;
    TangentVector prevD, prevPG;
    double prev_norm2 = 0.0;

    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        const SvdTriple &Z = run.rep.estimate;
        const TangentSpace T(Z);
        const AdjointImage G(E, run.resid);
        const TangentVector PG = detail::riemannian_gradient(T, G);
        const double norm2 = tangent_inner(T, PG, PG);

        bool conjugate = false;
        TangentVector D;
        if (prevT && prev_norm2 > 0.0) {
            double beta;
            if (opts.cg_beta == CgBeta::FletcherReeves) {
                beta = norm2 / prev_norm2;
            } else {
                const TangentVector old = transport(T, *prevT, prevPG);
                beta = std::max(0.0, (norm2 - tangent_inner(T, PG, old)) / prev_norm2);
            }
            if (beta > 0.0) {
                D = PG + beta * transport(T, *prevT, prevD);
                conjugate = tangent_inner(T, D, PG) > 0.0;
            }
        }

        SvdTriple next;
        double alpha = 0.0;
        if (conjugate) {
            alpha = detail::manifold_step(opts, E, T, D, PG, G);
            next = retract(T, TangentVector(anchor_vector(Z) + alpha * D), P.r);
            // Restart from the gradient when the conjugate step loses ground.
            if ((P.y - forward(E, next)).norm() > run.resid.norm())
                conjugate = false;
        }
        if (!conjugate) {
            D = PG;
            alpha = detail::manifold_step(opts, E, T, PG, PG, G);
            if (alpha == 0.0) {
                run.rep.status = Status::MaxIters;
                return std::move(run.rep);
            }
            next = retract(T, TangentVector(anchor_vector(Z) + alpha * PG), P.r);
        }
        prevT = T;
        prevD = std::move(D);
        prevPG = PG;
        prev_norm2 = norm2;
        if (run.accept(k, std::move(next), alpha))
            return std::move(run.rep);
    }
    run.rep.status = Status::MaxIters;
    return std::move(run.rep);
}

//------------------------------------------------------------------------------
// Rank-one PSD variant for phase retrieval
//------------------------------------------------------------------------------

/// `u u^T W + W u u^T - u u^T W u u^T` for unit `u` and symmetric `W`.
inline Matrix project_symmetric_tangent(const Vector &u, const Matrix &W)
{
    const Vector Wu = W * u;
    const double s = u.dot(Wu);
    return u * Wu.transpose() + Wu * u.transpose() - s * u * u.transpose();
}

/// Iterate `Z = sigma u u^T` of `rgrad_phase`.
struct PsdRankOne
{
    Vector u;
    double sigma = 0.0;

    Vector vector() const { return std::sqrt(std::max(sigma, 0.0)) * u; }
    Matrix dense() const { return sigma * u * u.transpose(); }
};

///
/// Riemannian gradient descent over rank-one PSD matrices
/// `Z = sigma u u^T`. The projected gradient is `u b^T + b u^T` with
/// `b = G u - (u^T G u) u / 2`, evaluated from `A u` without forming `G`.
/// The retraction is the top eigenpair of a 2 x 2 problem on
/// `span{u, b}`, with the eigenvalue clamped at zero.
///
/// The estimate is `sqrt(sigma) u`; the trace error is sign-invariant.
///
inline SolverReport<Vector> rgrad_phase(const ProblemInstance &P,
                                        const ManifoldOptions &opts)
{
    detail::validate(opts);
    const auto &E = P.ensemble;
    require(E.model() == Model::PhaseRetrieval, ErrorCode::InvalidInput,
            "rgrad_phase: phase retrieval ensemble required");
    const Matrix &A = E.phase().A;
    const double ynorm = P.y.norm();

    auto start = [&] {
        PsdRankOne z;
        const Vector z0 = phase_spectral_init(P, opts.phase_init);
        z.sigma = z0.squaredNorm();
        z.u = z.sigma > 0 ? Vector(z0 / std::sqrt(z.sigma)) : Vector::Unit(E.n(), 0);
        return z;
    };

    PsdRankOne Z = start();
    SolverReport<Vector> rep;
    Stopwatch clock;
    Vector Au = A * Z.u;
    Vector resid = P.y - Z.sigma * Au.cwiseAbs2();
    auto error = [&] {
        return opts.track_error && P.signal.size() > 0
                   ? phase_error(P.signal, Z.vector())
                   : std::numeric_limits<double>::quiet_NaN();
    };
    rep.trace.push_back({0, safe_ratio(resid.norm(), ynorm), error(), clock.elapsed_ms()});
    const double initial = rep.trace.front().rel_residual;
    if (initial <= opts.tol) {
        rep.estimate = Z.vector();
        rep.status = Status::Converged;
        return rep;
    }

    bool just_restarted = false;
    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        // G u = A^T (resid .* A u), u^T G u = sum resid (a^T u)^2
        const Vector Gu = A.transpose() * resid.cwiseProduct(Au);
        const double uGu = resid.dot(Au.cwiseAbs2());
        const Vector b = Gu - 0.5 * uGu * Z.u;
        const double c1 = Z.u.dot(b);

        double alpha = detail::guarded_step(opts, [&] {
            if (opts.step == StepRule::Constant)
                return opts.alpha;
            const Vector Ab = A * b;
            const double num = 2.0 * (c1 * c1 + b.squaredNorm());
            const double den = (2.0 * Au.cwiseProduct(Ab)).squaredNorm();
            return detail::step_ratio(num, den);
        });
        if (alpha == 0.0) {
            rep.estimate = Z.vector();
            rep.status = Status::MaxIters;
            return rep;
        }

        // sigma u u^T + alpha (u b^T + b u^T) in the basis [u, q]
        const Vector rest = b - c1 * Z.u;
        const double c2 = rest.norm();
        double lambda1;
        Vector unew;
        if (c2 > 1e-14 * std::max(b.norm(), 1e-300)) {
            Eigen::Matrix2d K;
            K << Z.sigma + 2.0 * alpha * c1, alpha * c2, alpha * c2, 0.0;
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(K);
            lambda1 = eig.eigenvalues()[1];
            const Eigen::Vector2d e = eig.eigenvectors().col(1);
            unew = e[0] * Z.u + e[1] * (rest / c2);
            unew.normalize();
        } else {
            lambda1 = Z.sigma + 2.0 * alpha * c1;
            unew = Z.u;
        }

        if (!(lambda1 > 0.0)) {
            if (just_restarted)
                throw Error(ErrorCode::RetractionDegenerate,
                            "rgrad_phase: top eigenvalue nonpositive after restart");
            Z = start();
            just_restarted = true;
        } else {
            Z.u = std::move(unew);
            Z.sigma = lambda1;
            just_restarted = false;
        }

        Au = A * Z.u;
        resid = P.y - Z.sigma * Au.cwiseAbs2();
        const double rr = safe_ratio(resid.norm(), ynorm);
        rep.trace.push_back({k, rr, error(), clock.elapsed_ms()});
        if (!std::isfinite(rr) || rr > 1e6 * std::max(initial, 1e-300)) {
            rep.estimate = Z.vector();
            rep.status = Status::Diverged;
            return rep;
        }
        if (rr <= opts.tol) {
            rep.estimate = Z.vector();
            rep.status = Status::Converged;
            return rep;
        }
    }
    rep.estimate = Z.vector();
    rep.status = Status::MaxIters;
    return rep;
}

} // namespace lrmr

#endif // LRMR_MANIFOLD_HPP
