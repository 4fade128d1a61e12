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
/// \file convex.hpp
///
/// First-order methods for nuclear-norm formulations:
///
/// - `svt_solve`: Uzawa dual ascent on
///   `min lambda ||Z||_* + 1/2 ||Z||_F^2  s.t.  A(Z) = y`
///   (`Y += alpha A^*(y - A(Z))`, `Z = D_lambda(Y)`).
/// - `fbs_solve`: forward-backward splitting on
///   `min 1/2 ||A(Z) - y||^2 + lambda ||Z||_*`.
/// - `admm_solve`: ADMM on the same objective with the split `Y = Z`.
///
/// All iterations start from `Z = Y = Lambda = 0`.
///
#ifndef LRMR_CONVEX_HPP
#define LRMR_CONVEX_HPP

#include <cmath>
#include <functional>
#include <optional>

#include "lrmr/linalg.hpp"
#include "lrmr/measurements.hpp"
#include "lrmr/report.hpp"

namespace lrmr
{

struct ConvexStep
{
    enum class Kind
    {
        Constant,  ///< alpha = value
        NormBound, ///< alpha = value / ||A||^2 with value in (0, 2)
    };
    Kind kind = Kind::NormBound;
    double value = 1.0;

    static ConvexStep constant(double alpha) { return {Kind::Constant, alpha}; }
    static ConvexStep norm_bound(double c) { return {Kind::NormBound, c}; }
};

/// Called after every iteration with `(iter, Z_k, auxiliary)`; the
/// auxiliary matrix is `Y_k` for SVT and ADMM and the previous iterate for
/// forward-backward splitting.
using ConvexObserver =
    std::function<void(std::size_t, const Matrix &, const Matrix &)>;

struct ConvexOptions
{
    double lambda = 1.0; ///< svt_solve weight; fbs/admm take lambda explicitly
    double mu = 1.0;     ///< ADMM penalty
    ConvexStep step{};
    double admm_relax = 1.0; ///< in (0, (1 + sqrt 5) / 2)
    double tol = 1e-6;
    std::size_t max_iters = 1000;
    double cg_tol = 1e-10;
    std::size_t cg_max_iters = 1000;
    ConvexObserver observer{};
};

namespace detail
{

inline void validate(const ConvexOptions &o)
{
    require(o.tol > 0 && o.max_iters >= 1, ErrorCode::InvalidOptions,
            "convex: need tol > 0 and max_iters >= 1");
    require(o.mu > 0, ErrorCode::InvalidOptions, "convex: mu must be positive");
    require(o.admm_relax > 0 && o.admm_relax < (std::sqrt(5.0) + 1.0) / 2.0,
            ErrorCode::InvalidOptions, "convex: ADMM relaxation outside (0, golden ratio)");
}

/// Resolves the step rule against `0 < alpha < 2 / ||A||^2`.
inline double resolve_step(const MeasurementEnsemble &E, const ConvexStep &s)
{
    const double norm_sq = operator_norm_sq(E);
    require(norm_sq > 0, ErrorCode::InvalidInput, "convex: measurement operator is zero");
    if (s.kind == ConvexStep::Kind::NormBound) {
        require(s.value > 0 && s.value < 2, ErrorCode::InvalidOptions,
                "convex: norm-bound factor must lie in (0, 2)");
        return s.value / norm_sq;
    }
    require(s.value > 0 && s.value < 2.0 / norm_sq, ErrorCode::InvalidOptions,
            "convex: constant step must lie in (0, 2 / ||A||^2)");
    return s.value;
}

inline bool diverged(double residual, double initial)
{
    return !std::isfinite(residual) || residual > 1e6 * std::max(initial, 1e-300);
}

} // namespace detail

/// Objective `1/2 ||A(Z) - y||^2 + lambda ||Z||_*`.
inline double regularized_objective(const ProblemInstance &P, const Matrix &Z,
                                    double lambda)
{
    return 0.5 * (forward(P.ensemble, Z) - P.y).squaredNorm() + lambda * nuclear_norm(Z);
}

///
/// Singular value thresholding (Uzawa) iteration. Stops when
/// `||A(Z_k) - y|| / ||y|| <= tol`.
///
inline SolverReport<Matrix> svt_solve(const ProblemInstance &P, const ConvexOptions &opts)
{
    detail::validate(opts);
    require(opts.lambda > 0, ErrorCode::InvalidOptions, "svt_solve: lambda must be positive");
    const auto &E = P.ensemble;
    const Index n = E.n();
    const double ynorm = P.y.norm();

    SolverReport<Matrix> rep;
    rep.estimate = Matrix::Zero(n, n);
    Stopwatch clock;
    if (ynorm == 0.0) {
        rep.trace.push_back({0, 0.0, relative_error(P, rep.estimate), clock.elapsed_ms()});
        rep.status = Status::Converged;
        return rep;
    }

    const double alpha = detail::resolve_step(E, opts.step);
    Matrix Y = Matrix::Zero(n, n);
    Matrix &Z = rep.estimate;
    Vector resid = forward(E, Z) - P.y;
    rep.trace.push_back({0, resid.norm() / ynorm, relative_error(P, Z), clock.elapsed_ms()});
    const double initial = rep.trace.front().rel_residual;

    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        Y -= alpha * adjoint(E, resid);
        Z = svt(Y, opts.lambda);
        resid = forward(E, Z) - P.y;
        const double rr = resid.norm() / ynorm;
        rep.trace.push_back({k, rr, relative_error(P, Z), clock.elapsed_ms()});
        if (opts.observer)
            opts.observer(k, Z, Y);
        if (detail::diverged(rr, initial)) {
            rep.status = Status::Diverged;
            return rep;
        }
        if (rr <= opts.tol) {
            rep.status = Status::Converged;
            return rep;
        }
    }
    rep.status = Status::MaxIters;
    return rep;
}

///
/// Forward-backward splitting,
/// `Z_{k+1} = D_{alpha lambda}(Z_k - alpha A^*(A(Z_k) - y))`. Stops when
/// `||Z_{k+1} - Z_k||_F / max(1, ||Z_k||_F) <= tol`.
///
inline SolverReport<Matrix> fbs_solve(const ProblemInstance &P, double lambda,
                                      const ConvexOptions &opts,
                                      const std::optional<Matrix> &start = std::nullopt)
{
    detail::validate(opts);
    require(lambda >= 0, ErrorCode::InvalidOptions, "fbs_solve: lambda must be nonnegative");
    const auto &E = P.ensemble;
    const Index n = E.n();
    const double ynorm = P.y.norm();
    const double alpha = detail::resolve_step(E, opts.step);

    SolverReport<Matrix> rep;
    rep.estimate = start ? *start : Matrix::Zero(n, n);
    Matrix &Z = rep.estimate;
    require(Z.rows() == n && Z.cols() == n, ErrorCode::InvalidInput,
            "fbs_solve: start must be n x n");
    Stopwatch clock;
    Vector resid = forward(E, Z) - P.y;
    rep.trace.push_back({0, safe_ratio(resid.norm(), ynorm), relative_error(P, Z),
                         clock.elapsed_ms()});
    const double initial = rep.trace.front().rel_residual;

    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        Matrix next = svt(Z - alpha * adjoint(E, resid), alpha * lambda);
        const double change = (next - Z).norm() / std::max(1.0, Z.norm());
        std::swap(Z, next);
        resid = forward(E, Z) - P.y;
        const double rr = safe_ratio(resid.norm(), ynorm);
        rep.trace.push_back({k, rr, relative_error(P, Z), clock.elapsed_ms()});
        if (opts.observer)
            opts.observer(k, Z, next);
        if (detail::diverged(rr, initial)) {
            rep.status = Status::Diverged;
            return rep;
        }
        if (change <= opts.tol) {
            rep.status = Status::Converged;
            return rep;
        }
    }
    rep.status = Status::MaxIters;
    return rep;
}

///
/// Runs `fbs_solve` over a geometric schedule
/// `lambda_0, lambda_0 * factor, ...` down to `lambda_min`, warm-starting
/// each stage. Traces are concatenated with continuous iteration numbers.
///
inline SolverReport<Matrix> fbs_continuation(const ProblemInstance &P, double lambda0,
                                             double lambda_min, double factor,
                                             const ConvexOptions &opts)
{
    require(lambda0 >= lambda_min && lambda_min > 0 && factor > 0 && factor < 1,
            ErrorCode::InvalidOptions,
            "fbs_continuation: need lambda0 >= lambda_min > 0 and factor in (0, 1)");
    SolverReport<Matrix> out;
    std::optional<Matrix> start;
    double lambda = lambda0;
    std::size_t offset = 0;
    double clock_offset = 0.0;
    while (true) {
        auto stage = fbs_solve(P, lambda, opts, start);
        for (std::size_t i = out.trace.empty() ? 0 : 1; i < stage.trace.size(); ++i) {
            auto row = stage.trace[i];
            row.iter += offset;
            row.elapsed_ms += clock_offset;
            out.trace.push_back(row);
        }
        offset = out.trace.back().iter;
        clock_offset = out.trace.back().elapsed_ms;
        out.status = stage.status;
        start = std::move(stage.estimate);
        if (lambda <= lambda_min || out.status == Status::Diverged)
            break;
        lambda = std::max(lambda * factor, lambda_min);
    }
    out.estimate = std::move(*start);
    return out;
}

namespace detail
{

/// Conjugate gradients for `(A^* A + mu I) Z = rhs` on matrix-shaped vectors.
inline Matrix solve_normal_cg(const MeasurementEnsemble &E, double mu, const Matrix &rhs,
                              Matrix Z, double tol, std::size_t max_iters)
{
    auto apply = [&](const Matrix &X) -> Matrix {
        return adjoint(E, forward(E, X)) + mu * X;
    };
    const double bnorm = rhs.norm();
    if (bnorm == 0.0)
        return Matrix::Zero(rhs.rows(), rhs.cols());
    Matrix R = rhs - apply(Z);
    Matrix D = R;
    double rs = R.squaredNorm();
    for (std::size_t it = 0; it < max_iters; ++it) {
        if (std::sqrt(rs) <= tol * bnorm)
            return Z;
        const Matrix AD = apply(D);
        const double a = rs / D.cwiseProduct(AD).sum();
        Z += a * D;
        R -= a * AD;
        const double rs_new = R.squaredNorm();
        D = R + (rs_new / rs) * D;
        rs = rs_new;
    }
    if (std::sqrt(rs) <= tol * bnorm)
        return Z;
    throw Error(ErrorCode::NumericalError, "admm: conjugate gradients did not converge");
}

} // namespace detail

///
/// ADMM:
///   `Z_{k+1} = (A^*A + mu I)^{-1}(A^*y + mu Y_k + Lambda_k)`,
///   `Y_{k+1} = D_{lambda/mu}(Z_{k+1} - Lambda_k / mu)`,
///   `Lambda_{k+1} = Lambda_k + alpha mu (Y_{k+1} - Z_{k+1})`.
///
/// The Z-update is entrywise for completion (`A^*A` is diagonal with the
/// sampling multiplicities) and uses conjugate gradients otherwise. Stops
/// when `||Y_{k+1} - Z_{k+1}||_F <= tol ||Z_{k+1}||_F` and
/// `||Y_{k+1} - Y_k||_F <= tol ||Y_{k+1}||_F`. The estimate is `Y`.
///
inline SolverReport<Matrix> admm_solve(const ProblemInstance &P, double lambda,
                                       const ConvexOptions &opts)
{
    detail::validate(opts);
    require(lambda >= 0, ErrorCode::InvalidOptions, "admm_solve: lambda must be nonnegative");
    const auto &E = P.ensemble;
    const Index n = E.n();
    const double mu = opts.mu;
    const double ynorm = P.y.norm();

    const Matrix Aty = adjoint(E, P.y);
    Matrix diag_inv;
    if (E.model() == Model::Completion) {
        Vector ones = Vector::Ones(E.m());
        diag_inv = (adjoint(E, ones).array() + mu).inverse().matrix();
    }

    SolverReport<Matrix> rep;
    Matrix Z = Matrix::Zero(n, n), Y = Matrix::Zero(n, n), Lam = Matrix::Zero(n, n);
    Stopwatch clock;
    rep.trace.push_back({0, safe_ratio((forward(E, Y) - P.y).norm(), ynorm),
                         relative_error(P, Y), clock.elapsed_ms()});
    const double initial = rep.trace.front().rel_residual;

    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        const Matrix rhs = Aty + mu * Y + Lam;
        if (E.model() == Model::Completion)
            Z = rhs.cwiseProduct(diag_inv);
        else
            Z = detail::solve_normal_cg(E, mu, rhs, Z, opts.cg_tol, opts.cg_max_iters);
        const Matrix Yprev = Y;
        Y = svt(Z - Lam / mu, lambda / mu);
        Lam += opts.admm_relax * mu * (Y - Z);

        const double rr = safe_ratio((forward(E, Y) - P.y).norm(), ynorm);
        rep.trace.push_back({k, rr, relative_error(P, Y), clock.elapsed_ms()});
        if (opts.observer)
            opts.observer(k, Z, Y);
        if (detail::diverged(rr, initial)) {
            rep.status = Status::Diverged;
            rep.estimate = Y;
            return rep;
        }
        // The primal gap alone closes after one step when lambda is small.
        if ((Y - Z).norm() <= opts.tol * Z.norm() &&
            (Y - Yprev).norm() <= opts.tol * Y.norm()) {
            rep.status = Status::Converged;
            rep.estimate = Y;
            return rep;
        }
    }
    rep.status = Status::MaxIters;
    rep.estimate = Y;
    return rep;
}

} // namespace lrmr

#endif // LRMR_CONVEX_HPP
