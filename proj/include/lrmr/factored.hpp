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
/// \file factored.hpp
///
/// Gradient methods on Burer-Monteiro factors `Z = L R^T`:
///
/// - `pgd_solve`: projected gradient descent on
///   `f(L, R) = 1/2 ||A(L R^T) - y||^2 + lambda ||L^T L - R^T R||_F^2`,
///   optionally followed by row trimming (completion).
/// - `wirtinger_flow`: gradient descent on
///   `f(z) = 1/(4m) sum_l ((a_l^T z)^2 - y_l)^2` for real phase retrieval.
///
#ifndef LRMR_FACTORED_HPP
#define LRMR_FACTORED_HPP

#include <cmath>
#include <optional>

#include "lrmr/init.hpp"
#include "lrmr/manifold.hpp"
#include "lrmr/measurements.hpp"
#include "lrmr/report.hpp"

namespace lrmr
{

struct FactoredState
{
    Matrix L;
    Matrix R;

    Matrix dense() const { return L * R.transpose(); }
};

struct PgdStep
{
    enum class Kind
    {
        Constant,
        Backtracking,
    };
    Kind kind = Kind::Backtracking;
    /// Constant step, or the first trial step of the line search. Zero
    /// selects the default (see `pgd_solve` / `wirtinger_flow`).
    double alpha = 0.0;
    double shrink = 0.5; ///< backtracking factor in (0, 1)
    double c = 1e-4;     ///< sufficient-decrease constant in (0, 1)

    static PgdStep constant(double a) { return {Kind::Constant, a, 0.5, 1e-4}; }
    static PgdStep backtracking(double shrink = 0.5, double c = 1e-4)
    {
        return {Kind::Backtracking, 0.0, shrink, c};
    }
};

struct PgdOptions
{
    double lambda_bal = 1.0 / 16.0;
    /// Incoherence bound for the trimming radius; estimated from `Z_0` when unset.
    std::optional<double> mu0;
    PgdStep step{};
    /// Row trimming after each step (completion only).
    bool use_projection = true;
    double tol = 1e-6;
    std::size_t max_iters = 1000;
    std::optional<SvdTriple> init;
    std::optional<Vector> init_vector; ///< Wirtinger flow starting point
    /// Wirtinger flow default step `wf_mu / ||z_0||^2`.
    double wf_mu = 0.2;
    PhaseInitNorm phase_init = PhaseInitNorm::Sqrt;
    bool track_error = true;

    /// Balance regulariser and trimming on.
    static PgdOptions faithful() { return {}; }

    /// Plain gradient descent on the data term.
    static PgdOptions bench()
    {
        PgdOptions o;
        o.lambda_bal = 0.0;
        o.use_projection = false;
        return o;
    }
};

namespace detail
{

inline void validate(const PgdOptions &o)
{
    require(o.tol > 0 && o.max_iters >= 1, ErrorCode::InvalidOptions,
            "pgd: need tol > 0 and max_iters >= 1");
    require(o.lambda_bal >= 0, ErrorCode::InvalidOptions, "pgd: lambda_bal must be >= 0");
    require(!o.mu0 || *o.mu0 > 0, ErrorCode::InvalidOptions, "pgd: mu0 must be positive");
    require(o.step.alpha >= 0, ErrorCode::InvalidOptions, "pgd: step must be >= 0");
    if (o.step.kind == PgdStep::Kind::Backtracking)
        require(o.step.shrink > 0 && o.step.shrink < 1 && o.step.c > 0 && o.step.c < 1,
                ErrorCode::InvalidOptions, "pgd: backtracking constants must lie in (0, 1)");
}

constexpr int kMaxBacktracks = 60;

} // namespace detail

//------------------------------------------------------------------------------
// objectives and gradients
//------------------------------------------------------------------------------

inline double pgd_objective(const MeasurementEnsemble &E, const Vector &y, const Matrix &L,
                            const Matrix &R, double lambda_bal)
{
    const double data = 0.5 * (forward_factored(E, L, R) - y).squaredNorm();
    if (lambda_bal == 0.0)
        return data;
    return data + lambda_bal * (L.transpose() * L - R.transpose() * R).squaredNorm();
}

struct FactoredGradient
{
    Matrix L;
    Matrix R;
};

///
/// `grad_L = A^*(A(L R^T) - y) R + 4 lambda L (L^T L - R^T R)`,
/// `grad_R = A^*(A(L R^T) - y)^T L - 4 lambda R (L^T L - R^T R)`.
///
inline FactoredGradient pgd_gradient(const MeasurementEnsemble &E, const Vector &y,
                                     const Matrix &L, const Matrix &R, double lambda_bal)
{
    const AdjointImage G(E, forward_factored(E, L, R) - y);
    FactoredGradient g{G.times(R), G.transpose_times(L)};
    if (lambda_bal != 0.0) {
        const Matrix D = L.transpose() * L - R.transpose() * R;
        g.L += 4.0 * lambda_bal * L * D;
        g.R -= 4.0 * lambda_bal * R * D;
    }
    return g;
}

inline double wf_objective(const MeasurementEnsemble &E, const Vector &y, const Vector &z)
{
    return (intensities(E, z) - y).squaredNorm() / (4.0 * static_cast<double>(E.m()));
}

/// `(1/m) sum_l ((a_l^T z)^2 - y_l) (a_l^T z) a_l`.
inline Vector wf_gradient(const MeasurementEnsemble &E, const Vector &y, const Vector &z)
{
    const Matrix &A = E.phase().A;
    const Vector Az = A * z;
    const Vector w = (Az.cwiseAbs2() - y).cwiseProduct(Az);
    return A.transpose() * w / static_cast<double>(E.m());
}

/// Rescales every row of `M` whose norm exceeds `radius` onto the sphere.
inline Matrix trim_rows(Matrix M, double radius)
{
    require(radius >= 0, ErrorCode::InvalidInput, "trim_rows: radius must be >= 0");
    for (Index i = 0; i < M.rows(); ++i) {
        const double nrm = M.row(i).norm();
        if (nrm > radius)
            M.row(i) *= radius / nrm;
    }
    return M;
}

/// `sqrt(2 mu0 r / n) ||Z_0||_2^{1/2}`.
inline double trim_radius(double mu0, Index r, Index n, double z0_norm)
{
    return std::sqrt(2.0 * mu0 * static_cast<double>(r) / static_cast<double>(n)) *
           std::sqrt(z0_norm);
}

//------------------------------------------------------------------------------
// initialisation
//------------------------------------------------------------------------------

/// `iters` NIHT steps from the spectral initialisation.
inline SvdTriple iht_warm_start(const ProblemInstance &P, std::size_t iters)
{
    require(iters >= 1, ErrorCode::InvalidInput, "iht_warm_start: iters must be >= 1");
    ManifoldOptions o;
    o.step = StepRule::Niht;
    o.max_iters = iters;
    o.tol = std::numeric_limits<double>::min();
    o.track_error = false;
    return iht_solve(P, o).estimate;
}

//------------------------------------------------------------------------------
// PGD
//------------------------------------------------------------------------------

///
/// Projected gradient descent from the balanced factors of `Z_0`.
///
/// Stepsize defaults scale with the sampling rate `s` (`m / n^2` for
/// completion, 1 otherwise): the constant rule uses
/// `1 / (4 s ||Z_0||_2)`, and backtracking first tries `1 / (s ||Z_0||_2)`,
/// then twice the previous accepted step.
///
inline SolverReport<FactoredState> pgd_solve(const ProblemInstance &P,
                                             const PgdOptions &opts)
{
    detail::validate(opts);
    const auto &E = P.ensemble;
    require(E.model() != Model::PhaseRetrieval, ErrorCode::InvalidInput,
            "pgd_solve: use wirtinger_flow for phase retrieval");
    const Index n = E.n(), r = P.r;
    const double ynorm = P.y.norm();
    const double lam = opts.lambda_bal;

    const SvdTriple Z0 = opts.init ? *opts.init : spectral_init(P);
    require(Z0.rank() == r, ErrorCode::InvalidInput, "pgd_solve: init must have rank r");
    const double z0_norm = Z0.sigma.size() ? Z0.sigma[0] : 0.0;
    const Vector root = Z0.sigma.cwiseSqrt();

    SolverReport<FactoredState> rep;
    FactoredState &X = rep.estimate;
    X.L = Z0.U * root.asDiagonal();
    X.R = Z0.V * root.asDiagonal();

    const bool project = opts.use_projection && E.model() == Model::Completion;
    double radius = 0.0;
    if (project) {
        const double mu0 = opts.mu0 ? *opts.mu0 : incoherence(Z0);
        radius = trim_radius(mu0, r, n, z0_norm);
        X.L = trim_rows(X.L, radius);
        X.R = trim_rows(X.R, radius);
    }

    const double rate = E.model() == Model::Completion
                            ? static_cast<double>(E.m()) / static_cast<double>(n * n)
                            : 1.0;
    const double scale = z0_norm > 0 ? 1.0 / (rate * z0_norm) : 1.0;
    double trial = opts.step.alpha > 0 ? opts.step.alpha
                   : opts.step.kind == PgdStep::Kind::Constant ? scale / 4.0
                                                               : scale;

    Stopwatch clock;
    auto error = [&] {
        return opts.track_error ? relative_error(P, X.dense())
                                : std::numeric_limits<double>::quiet_NaN();
    };
    Vector resid = forward_factored(E, X.L, X.R) - P.y;
    rep.trace.push_back({0, safe_ratio(resid.norm(), ynorm), error(), clock.elapsed_ms()});
    const double initial = rep.trace.front().rel_residual;
    if (initial <= opts.tol) {
        rep.status = Status::Converged;
        return rep;
    }

    auto step_to = [&](double t, const FactoredGradient &g) {
        FactoredState next{X.L - t * g.L, X.R - t * g.R};
        if (project) {
            next.L = trim_rows(std::move(next.L), radius);
            next.R = trim_rows(std::move(next.R), radius);
        }
        return next;
    };

    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        const FactoredGradient g = pgd_gradient(E, P.y, X.L, X.R, lam);
        if (opts.step.kind == PgdStep::Kind::Constant) {
            X = step_to(trial, g);
        } else {
            const double f = pgd_objective(E, P.y, X.L, X.R, lam);
            double t = trial;
            bool accepted = false;
            for (int b = 0; b < detail::kMaxBacktracks; ++b, t *= opts.step.shrink) {
                FactoredState cand = step_to(t, g);
                const double decrease = g.L.cwiseProduct(X.L - cand.L).sum() +
                                        g.R.cwiseProduct(X.R - cand.R).sum();
                if (pgd_objective(E, P.y, cand.L, cand.R, lam) <=
                    f - opts.step.c * decrease) {
                    X = std::move(cand);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                rep.status = Status::MaxIters;
                return rep;
            }
            trial = 2.0 * t;
        }

        resid = forward_factored(E, X.L, X.R) - P.y;
        const double rr = safe_ratio(resid.norm(), ynorm);
        rep.trace.push_back({k, rr, error(), clock.elapsed_ms()});
        if (!std::isfinite(rr) || rr > 1e6 * std::max(initial, 1e-300)) {
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

//------------------------------------------------------------------------------
// Wirtinger flow
//------------------------------------------------------------------------------

///
/// Real Wirtinger flow `z_{k+1} = z_k - alpha_k grad f(z_k)` from the
/// rescaled spectral initialisation. The constant step defaults to
/// `wf_mu / ||z_0||^2`; backtracking starts there and doubles the previous
/// accepted step on each iteration.
///
inline SolverReport<Vector> wirtinger_flow(const ProblemInstance &P, const PgdOptions &opts)
{
    detail::validate(opts);
    const auto &E = P.ensemble;
    require(E.model() == Model::PhaseRetrieval, ErrorCode::InvalidInput,
            "wirtinger_flow: phase retrieval ensemble required");
    const double ynorm = P.y.norm();

    SolverReport<Vector> rep;
    Vector &z = rep.estimate;
    z = opts.init_vector ? *opts.init_vector : phase_spectral_init(P, opts.phase_init);
    require(z.size() == E.n(), ErrorCode::InvalidInput, "wirtinger_flow: bad init length");

    const double z0_sq = z.squaredNorm();
    double trial = opts.step.alpha > 0 ? opts.step.alpha
                                       : opts.wf_mu / (z0_sq > 0 ? z0_sq : 1.0);

    Stopwatch clock;
    auto error = [&] {
        return opts.track_error && P.signal.size() > 0
                   ? phase_error(P.signal, z)
                   : std::numeric_limits<double>::quiet_NaN();
    };
    rep.trace.push_back({0, safe_ratio((intensities(E, z) - P.y).norm(), ynorm), error(),
                         clock.elapsed_ms()});
    const double initial = rep.trace.front().rel_residual;
    if (initial <= opts.tol) {
        rep.status = Status::Converged;
        return rep;
    }

    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        const Vector g = wf_gradient(E, P.y, z);
        if (opts.step.kind == PgdStep::Kind::Constant) {
            z -= trial * g;
        } else {
            const double f = wf_objective(E, P.y, z);
            const double g2 = g.squaredNorm();
            double t = trial;
            bool accepted = false;
            for (int b = 0; b < detail::kMaxBacktracks; ++b, t *= opts.step.shrink) {
                Vector cand = z - t * g;
                if (wf_objective(E, P.y, cand) <= f - opts.step.c * t * g2) {
                    z = std::move(cand);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                rep.status = Status::MaxIters;
                return rep;
            }
            trial = 2.0 * t;
        }

        const double rr = safe_ratio((intensities(E, z) - P.y).norm(), ynorm);
        rep.trace.push_back({k, rr, error(), clock.elapsed_ms()});
        if (!std::isfinite(rr) || rr > 1e6 * std::max(initial, 1e-300)) {
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

} // namespace lrmr

#endif // LRMR_FACTORED_HPP
