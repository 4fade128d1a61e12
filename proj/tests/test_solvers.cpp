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


// Unit tests: manifold and factored solvers, Hankel completion, robust PCA
// and the experiment harness.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "lrmr/lrmr.hpp"

namespace
{

using namespace lrmr;

ProblemInstance full_completion(Index n, Index r, std::uint64_t seed)
{
    return generate_instance(Model::Completion, n, r, n * n, seed, Sampling::Full);
}

Index dof_measurements(Index n, Index r, double rho)
{
    return static_cast<Index>(std::ceil(rho * static_cast<double>((2 * n - r) * r)));
}

//------------------------------------------------------------------------------
// manifold solvers
//------------------------------------------------------------------------------

TEST(IhtSolve, FullObservationOneStep)
{
    const auto P = full_completion(12, 2, 1);
    Rng rng(1);
    for (StepRule rule : {StepRule::Constant, StepRule::Niht, StepRule::Exact}) {
        ManifoldOptions o;
        o.step = rule;
        o.alpha = 1.0;
        o.max_iters = 1;
        o.init = truncate_rank(gaussian_matrix(12, 12, rng), 2);
        const auto rep = iht_solve(P, o);
        EXPECT_LE((rep.estimate.dense() - P.truth).norm(), 1e-10 * P.truth.norm());
    }
}

TEST(Stepsizes, EqualOneUnderFullObservation)
{
    const auto P = full_completion(10, 2, 2);
    Rng rng(2);
    for (int t = 0; t < 10; ++t) {
        const SvdTriple Z = truncate_rank(gaussian_matrix(10, 10, rng), 2);
        const AdjointImage G(P.ensemble, Vector(P.y - forward(P.ensemble, Z)));
        const TangentSpace T(Z);
        EXPECT_EQ(niht_stepsize(P.ensemble, Z.U, G), 1.0);
        EXPECT_EQ(rgrad_stepsize(P.ensemble, T, project_tangent(T, G.dense())), 1.0);
        EXPECT_EQ(gradient_stepsize(P.ensemble, G), 1.0);
    }
}

TEST(Stepsizes, DegenerateDenominatorThrows)
{
    EXPECT_EQ(detail::step_ratio(0.0, 0.0), 0.0);
    try {
        detail::step_ratio(1.0, 0.0);
        FAIL() << "expected StepsizeDegenerate";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::StepsizeDegenerate);
    }
}

TEST(IhtSolve, NihtLinearConvergenceOnSensing)
{
    const Index n = 30, r = 2;
    const auto P = generate_instance(Model::Sensing, n, r, 6 * n * r, 3);
    ManifoldOptions o;
    o.step = StepRule::Niht;
    o.tol = 1e-10;
    const auto rep = iht_solve(P, o);
    ASSERT_EQ(rep.status, Status::Converged);
    for (std::size_t k = 0; k + 10 < rep.trace.size(); ++k)
        EXPECT_LE(rep.trace[k + 10].rel_residual, 0.9 * rep.trace[k].rel_residual) << k;
}

TEST(RgradSolve, ExactStepIsOneUnderFullObservation)
{
    const auto P = full_completion(15, 3, 4);
    Rng rng(4);
    ManifoldOptions o;
    o.init = truncate_rank(gaussian_matrix(15, 15, rng), 3);
    o.max_iters = 5;
    std::vector<double> alphas;
    o.observer = [&](const ManifoldIterate &it) { alphas.push_back(it.alpha); };
    rgrad_solve(P, o);
    ASSERT_FALSE(alphas.empty());
    for (double a : alphas)
        EXPECT_EQ(a, 1.0);
}

TEST(RgradSolve, TruthIsStationary)
{
    const auto P = generate_instance(Model::Sensing, 10, 2, 120, 5);
    ManifoldOptions o;
    o.init = P.ground_truth;
    const auto rep = rgrad_solve(P, o);
    EXPECT_EQ(rep.status, Status::Converged);
    EXPECT_EQ(rep.iterations(), 0u);
    EXPECT_LE((rep.estimate.dense() - P.truth).norm(), 1e-12 * P.truth.norm());
}

TEST(RgradSolve, IteratesMatchDenseOracleAndLineSearchIsExact)
{
    const Index n = 15, r = 2;
    const auto P = generate_instance(Model::Sensing, n, r, 6 * n * r, 6);
    ManifoldOptions o;
    o.max_iters = 15;
    o.tol = 1e-14;
    int checked = 0;
    o.observer = [&](const ManifoldIterate &it) {
        const Matrix Z = it.prev.dense();
        const Matrix G = adjoint(P.ensemble, Vector(P.y - forward(P.ensemble, Z)));
        const TangentSpace T(it.prev);
        const Matrix PG = densify(T, project_tangent(T, G));
        const auto oracle = truncate_rank(Matrix(Z + it.alpha * PG), r);
        EXPECT_LE((it.next.dense() - oracle.dense()).norm(), 1e-10 * Z.norm());
        // sigma_{r+1} of the dense iterate is zero by construction.
        EXPECT_LE(compact_svd(it.next.dense()).sigma[r], 1e-10 * it.next.sigma[0]);
        auto f = [&](double a) {
            return (forward(P.ensemble, Matrix(Z + a * PG)) - P.y).squaredNorm();
        };
        const double f0 = f(it.alpha);
        EXPECT_LE(f0, f(1.01 * it.alpha) * (1 + 1e-12));
        EXPECT_LE(f0, f(0.99 * it.alpha) * (1 + 1e-12));
        ++checked;
    };
    rgrad_solve(P, o);
    EXPECT_GT(checked, 5);
}

TEST(RcgSolve, FirstStepIsBitwiseRgrad)
{
    for (Model model : {Model::Sensing, Model::Completion}) {
        const auto P = generate_instance(model, 20, 2, 300, 7);
        ManifoldOptions o;
        o.max_iters = 1;
        const auto a = rgrad_solve(P, o);
        const auto b = rcg_solve(P, o);
        EXPECT_EQ(a.estimate.U, b.estimate.U);
        EXPECT_EQ(a.estimate.sigma, b.estimate.sigma);
        EXPECT_EQ(a.estimate.V, b.estimate.V);
        EXPECT_EQ(a.trace.back().rel_residual, b.trace.back().rel_residual);
    }
}

TEST(RcgSolve, FullObservationConvergesWithinTwoIterations)
{
    // Starting point sharing the column space of X, so X lies in the first
    // tangent space and the problem restricted to it is an isometric quadratic.
    const auto P = full_completion(20, 3, 8);
    Rng rng(8);
    SvdTriple Z0 = P.ground_truth;
    Z0.V = compact_svd(gaussian_matrix(20, 3, rng)).U;
    Z0.sigma = Vector::Ones(3);
    ManifoldOptions o;
    o.init = Z0;
    o.tol = 1e-10;
    const auto rep = rcg_solve(P, o);
    EXPECT_EQ(rep.status, Status::Converged);
    EXPECT_LE(rep.iterations(), 2u);
    EXPECT_LE(rep.final_rel_error(), 1e-10);
}

TEST(RcgSolve, FullObservationFromRandomStartConverges)
{
    const auto P = full_completion(20, 3, 8);
    Rng rng(8);
    ManifoldOptions o;
    o.init = truncate_rank(gaussian_matrix(20, 20, rng), 3);
    o.tol = 1e-10;
    const auto rep = rcg_solve(P, o);
    EXPECT_EQ(rep.status, Status::Converged);
    EXPECT_LE(rep.final_rel_error(), 1e-9);
}

TEST(RcgSolve, FewerIterationsThanRgradOnCompletion)
{
    const Index n = 100, r = 3;
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto P = generate_instance(Model::Completion, n, r, dof_measurements(n, r, 3.0), seed);
        ManifoldOptions o;
        o.max_iters = 3000;
        o.init = iht_warm_start(P, 10);
        const auto g = rgrad_solve(P, o);
        const auto c = rcg_solve(P, o);
        ASSERT_EQ(c.status, Status::Converged) << "seed " << seed;
        EXPECT_LE(c.final_rel_error(), 1e-4);
        wins += c.iterations() < g.iterations() ? 1 : 0;
    }
    EXPECT_GE(wins, 4);
}

TEST(ManifoldOptions, Validation)
{
    const auto P = full_completion(5, 1, 0);
    ManifoldOptions o;
    o.tol = 0;
    EXPECT_THROW(rgrad_solve(P, o), Error);
    o = {};
    o.init = truncate_rank(Matrix(Matrix::Identity(5, 5)), 2);
    EXPECT_THROW(rgrad_solve(P, o), Error);
}

TEST(PhaseTangent, ProjectionIdentities)
{
    Rng rng(9);
    for (int t = 0; t < 10; ++t) {
        Vector u = gaussian_vector(8, rng);
        u.normalize();
        Matrix W = gaussian_matrix(8, 8, rng);
        W = (W + W.transpose()).eval();
        const Matrix P1 = project_symmetric_tangent(u, W);
        const Matrix uu = u * u.transpose();
        const Matrix oracle = uu * W + W * uu - uu * W * uu;
        EXPECT_LE((P1 - oracle).norm(), 1e-10 * W.norm());
        EXPECT_LE((P1 - P1.transpose()).norm(), 1e-10 * W.norm());
        EXPECT_LE((project_symmetric_tangent(u, P1) - P1).norm(), 1e-10 * W.norm());
    }
}

TEST(RgradPhase, RecoversGaussianPhaseRetrieval)
{
    const Index n = 64;
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto P = generate_instance(Model::PhaseRetrieval, n, 1, 10 * n, seed);
        ManifoldOptions o;
        o.max_iters = 3000;
        o.tol = 1e-9;
        const auto rep = rgrad_phase(P, o);
        ok += phase_error(P.signal, rep.estimate) <= 1e-5 ? 1 : 0;
    }
    EXPECT_GE(ok, 8);
}

//------------------------------------------------------------------------------
// factored solvers
//------------------------------------------------------------------------------

TEST(PgdGradient, VanishesAtBalancedMinimiser)
{
    const auto P = generate_instance(Model::Sensing, 10, 2, 100, 10);
    const Vector root = P.ground_truth.sigma.cwiseSqrt();
    const Matrix L = P.ground_truth.U * root.asDiagonal();
    const Matrix R = P.ground_truth.V * root.asDiagonal();
    const auto g = pgd_gradient(P.ensemble, P.y, L, R, 1.0 / 16);
    const double scale = P.ground_truth.sigma[0];
    EXPECT_LE(g.L.norm(), 1e-10 * scale);
    EXPECT_LE(g.R.norm(), 1e-10 * scale);
}

TEST(PgdGradient, MatchesCentralDifferences)
{
    Rng rng(11);
    const auto P = generate_instance(Model::Completion, 8, 2, 40, 11);
    const double lam = 0.1, h = 1e-6;
    for (int t = 0; t < 5; ++t) {
        const Matrix L = gaussian_matrix(8, 2, rng), R = gaussian_matrix(8, 2, rng);
        const auto g = pgd_gradient(P.ensemble, P.y, L, R, lam);
        Matrix fdL(8, 2), fdR(8, 2);
        for (Index i = 0; i < 8; ++i)
            for (Index j = 0; j < 2; ++j) {
                Matrix Lp = L, Lm = L, Rp = R, Rm = R;
                Lp(i, j) += h;
                Lm(i, j) -= h;
                Rp(i, j) += h;
                Rm(i, j) -= h;
                fdL(i, j) = (pgd_objective(P.ensemble, P.y, Lp, R, lam) -
                             pgd_objective(P.ensemble, P.y, Lm, R, lam)) / (2 * h);
                fdR(i, j) = (pgd_objective(P.ensemble, P.y, L, Rp, lam) -
                             pgd_objective(P.ensemble, P.y, L, Rm, lam)) / (2 * h);
            }
        EXPECT_LE((g.L - fdL).norm(), 1e-5 * g.L.norm());
        EXPECT_LE((g.R - fdR).norm(), 1e-5 * g.R.norm());
    }
}

TEST(PgdGradient, RescalingFactorsRescalesGradients)
{
    Rng rng(12);
    const auto P = generate_instance(Model::Sensing, 6, 2, 50, 12);
    const Matrix L = gaussian_matrix(6, 2, rng), R = gaussian_matrix(6, 2, rng);
    const double c = 3.0;
    const auto g = pgd_gradient(P.ensemble, P.y, L, R, 0.0);
    const auto gs = pgd_gradient(P.ensemble, P.y, Matrix(c * L), Matrix(R / c), 0.0);
    EXPECT_LE((gs.L - g.L / c).norm(), 1e-12 * g.L.norm());
    EXPECT_LE((gs.R - c * g.R).norm(), 1e-12 * g.R.norm());
    EXPECT_LE(((c * L) * (R / c).transpose() - L * R.transpose()).norm(),
              1e-12 * (L * R.transpose()).norm());
}

TEST(TrimRows, RescalesOnlyLongRows)
{
    Matrix M(3, 2);
    M << 3, 4, 0.1, 0.2, -6, 8;
    const Matrix T = trim_rows(M, 2.0);
    EXPECT_NEAR(T.row(0).norm(), 2.0, 1e-15);
    EXPECT_NEAR(T.row(2).norm(), 2.0, 1e-15);
    EXPECT_LE((T.row(0) / 2.0 - M.row(0) / 5.0).norm(), 1e-15);
    EXPECT_EQ(T.row(1), M.row(1));
    // Idempotent and never increases a row norm.
    EXPECT_EQ(trim_rows(T, 2.0), T);
    for (Index i = 0; i < 3; ++i)
        EXPECT_LE(T.row(i).norm(), M.row(i).norm());
}

TEST(IhtWarmStart, FullObservationAndValidation)
{
    const auto P = full_completion(10, 2, 13);
    EXPECT_LE((iht_warm_start(P, 1).dense() - P.truth).norm(), 1e-10 * P.truth.norm());
    try {
        iht_warm_start(P, 0);
        FAIL() << "expected InvalidInput";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
    }
}

TEST(IhtWarmStart, ImprovesOnSpectralInit)
{
    const Index n = 30, r = 2;
    int better = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto P = generate_instance(Model::Sensing, n, r, 6 * n * r, seed);
        const double e0 = relative_error(P, spectral_init(P).dense());
        const double e1 = relative_error(P, iht_warm_start(P, 5).dense());
        better += e1 < e0 ? 1 : 0;
    }
    EXPECT_GE(better, 9);
}

TEST(PgdSolve, FaithfulPresetConvergesBalanced)
{
    const Index n = 20, r = 2;
    const auto P = generate_instance(Model::Sensing, n, r, 6 * n * r, 14);
    auto o = PgdOptions::faithful();
    o.max_iters = 5000;
    o.tol = 1e-10;
    const auto rep = pgd_solve(P, o);
    ASSERT_EQ(rep.status, Status::Converged);
    EXPECT_LE(rep.final_rel_error(), 1e-4);
    const Matrix D = rep.estimate.L.transpose() * rep.estimate.L -
                     rep.estimate.R.transpose() * rep.estimate.R;
    EXPECT_LE(D.norm(), 1e-6 * P.ground_truth.sigma[0]);
}

TEST(PgdSolve, FullObservationSpectralStartIsExact)
{
    const auto P = full_completion(12, 2, 15);
    const auto rep = pgd_solve(P, PgdOptions::bench());
    EXPECT_EQ(rep.status, Status::Converged);
    EXPECT_LE(rep.iterations(), 2u);
}

TEST(PgdSolve, RejectsPhaseRetrieval)
{
    const auto P = generate_instance(Model::PhaseRetrieval, 4, 1, 20, 0);
    EXPECT_THROW(pgd_solve(P, {}), Error);
    const auto Q = full_completion(4, 1, 0);
    EXPECT_THROW(wirtinger_flow(Q, {}), Error);
}

TEST(WirtingerFlow, GradientVanishesAtSignal)
{
    const auto P = generate_instance(Model::PhaseRetrieval, 12, 1, 60, 16);
    const Vector y = intensities(P.ensemble, P.signal);
    EXPECT_EQ(wf_gradient(P.ensemble, y, P.signal).norm(), 0.0);
    EXPECT_EQ(wf_gradient(P.ensemble, y, Vector(-P.signal)).norm(), 0.0);
}

TEST(WirtingerFlow, ScalarExample)
{
    ProblemInstance P;
    P.model = Model::PhaseRetrieval;
    P.ensemble = MeasurementEnsemble::phase_retrieval(Matrix::Ones(1, 1));
    P.y = Vector::Constant(1, 4.0);
    P.signal = Vector::Constant(1, 2.0);
    PgdOptions o;
    o.step = PgdStep::constant(1.0 / 6.0);
    o.init_vector = Vector::Constant(1, 1.0);
    o.max_iters = 1;
    const auto rep = wirtinger_flow(P, o);
    EXPECT_DOUBLE_EQ(rep.estimate[0], 1.5);
}

TEST(WirtingerFlow, GradientMatchesCentralDifferences)
{
    Rng rng(17);
    const auto P = generate_instance(Model::PhaseRetrieval, 10, 1, 50, 17);
    const double h = 1e-6;
    for (int t = 0; t < 5; ++t) {
        const Vector z = gaussian_vector(10, rng);
        const Vector g = wf_gradient(P.ensemble, P.y, z);
        Vector fd(10);
        for (Index i = 0; i < 10; ++i) {
            Vector zp = z, zm = z;
            zp[i] += h;
            zm[i] -= h;
            fd[i] = (wf_objective(P.ensemble, P.y, zp) - wf_objective(P.ensemble, P.y, zm)) /
                    (2 * h);
        }
        EXPECT_LE((g - fd).norm(), 1e-5 * g.norm());
    }
}

//------------------------------------------------------------------------------
// hankel
//------------------------------------------------------------------------------

using hankel::HankelShape;

ComplexVector random_complex(Index n, Rng &rng)
{
    return gaussian_vector(n, rng).cast<Complex>() +
           Complex(0, 1) * gaussian_vector(n, rng).cast<Complex>();
}

ComplexMatrix random_complex(Index n1, Index n2, Rng &rng)
{
    return gaussian_matrix(n1, n2, rng).cast<Complex>() +
           Complex(0, 1) * gaussian_matrix(n1, n2, rng).cast<Complex>();
}

TEST(Hankel, LiftExample)
{
    const ComplexVector z = (ComplexVector(3) << 1, 2, 3).finished();
    ComplexMatrix expected(2, 2);
    expected << 1, 2, 2, 3;
    EXPECT_EQ(hankel::hankel_lift(z, {2, 2}), expected);
    EXPECT_EQ(hankel::hankel_lift(ComplexVector::Zero(5), {3, 3}).norm(), 0.0);
    EXPECT_EQ(HankelShape::squarest(127).n1, 64);
    EXPECT_EQ(HankelShape::squarest(127).n2, 64);
    EXPECT_EQ(HankelShape::squarest(4).n1, 3);
}

TEST(Hankel, PinvExamples)
{
    ComplexMatrix H(2, 2);
    H << 1, 2, 2, 3;
    const ComplexVector expected = (ComplexVector(3) << 1, 2, 3).finished();
    EXPECT_EQ(hankel::hankel_pinv(H, {2, 2}), expected);
    ComplexMatrix M(2, 2);
    M << 1, 4, 0, 3;
    EXPECT_LE((hankel::hankel_pinv(M, {2, 2}) - expected).norm(), 1e-15);
    EXPECT_EQ(hankel::hankel_pinv(ComplexMatrix::Zero(2, 2), {2, 2}).norm(), 0.0);
}

TEST(Hankel, PinvIsLeastSquares)
{
    // Oracle: least-squares solve against the explicit lift matrix.
    Rng rng(18);
    const HankelShape s{4, 3};
    const Index n = s.n();
    ComplexMatrix H = ComplexMatrix::Zero(s.n1 * s.n2, n);
    for (Index j = 0; j < s.n2; ++j)
        for (Index i = 0; i < s.n1; ++i)
            H(i + j * s.n1, i + j) = 1.0;
    const ComplexMatrix M = random_complex(s.n1, s.n2, rng);
    const ComplexVector vecM = Eigen::Map<const ComplexVector>(M.data(), M.size());
    const ComplexVector oracle = H.colPivHouseholderQr().solve(vecM);
    EXPECT_LE((hankel::hankel_pinv(M, s) - oracle).norm(), 1e-12 * oracle.norm());
}

TEST(Hankel, AdjointAndPinvIdentities)
{
    Rng rng(19);
    const HankelShape s = HankelShape::squarest(21);
    for (int t = 0; t < 100; ++t) {
        const ComplexVector z = random_complex(21, rng);
        const ComplexMatrix M = random_complex(s.n1, s.n2, rng);
        const ComplexMatrix Hz = hankel::hankel_lift(z, s);
        const Complex lhs = Hz.cwiseProduct(M.conjugate()).sum();
        const Complex rhs = z.cwiseProduct(hankel::hankel_adjoint(M, s).conjugate()).sum();
        ASSERT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(lhs)));
        ASSERT_LE((hankel::hankel_pinv(Hz, s) - z).norm(), 1e-12 * z.norm());
        const ComplexMatrix proj = hankel::hankel_lift(hankel::hankel_pinv(M, s), s);
        ASSERT_LE((proj - M).norm(), M.norm());
    }
}

TEST(Hankel, FactoredProductsMatchDense)
{
    Rng rng(20);
    const HankelShape s{6, 5};
    const ComplexMatrix P = random_complex(6, 2, rng), Q = random_complex(5, 2, rng);
    const ComplexVector z = random_complex(10, rng);
    EXPECT_LE((hankel::hankel_pinv_factored(P, Q, s) -
               hankel::hankel_pinv(ComplexMatrix(P * Q.adjoint()), s)).norm(),
              1e-12 * (P * Q.adjoint()).norm());
    const ComplexMatrix Hz = hankel::hankel_lift(z, s);
    EXPECT_LE((hankel::hankel_times(z, s, Q) - Hz * Q).norm(), 1e-12 * Hz.norm());
    EXPECT_LE((hankel::hankel_adjoint_times(z, s, P) - Hz.adjoint() * P).norm(),
              1e-12 * Hz.norm());
}

TEST(Hankel, SpectralSignalsLiftToExactRank)
{
    for (Index n : {31, 127, 255}) {
        for (Index r : {1, 3, 8}) {
            const auto sig = hankel::random_signal(n, r, static_cast<std::uint64_t>(n + r));
            const Vector s = compact_svd(hankel::hankel_lift(sig.x, HankelShape::squarest(n))).sigma;
            EXPECT_LE(s[r] / s[0], 1e-8) << "n " << n << " r " << r;
            EXPECT_GT(s[r - 1] / s[0], 1e-6) << "n " << n << " r " << r;
        }
    }
}

TEST(Fiht, FullObservationIsExact)
{
    const auto sig = hankel::random_signal(63, 3, 1);
    std::vector<Index> all(63);
    std::iota(all.begin(), all.end(), 0);
    hankel::FihtOptions o;
    o.truth = sig.x;
    o.max_iters = 1;
    const auto rep = hankel::fiht_solve(hankel::observe(sig.x, all), 3, o);
    EXPECT_LE(rep.final_rel_error(), 1e-10);
}

TEST(Fiht, ConstantSignalHalfObserved)
{
    const Index n = 64;
    const auto sig = hankel::make_signal(n, {0.0}, {0.0}, {Complex(1.0)});
    hankel::FihtOptions o;
    o.truth = sig.x;
    o.tol = 1e-12;
    const auto rep = hankel::fiht_solve(
        hankel::observe(sig.x, hankel::random_support(n, n / 2, 3)), 1, o);
    EXPECT_LE(rep.final_rel_error(), 1e-8);
}

TEST(Fiht, AgreesWithIhtWhenUpdateStaysInTangentSpace)
{
    // From z0 = x / 2 under full observation with alpha = 1 the lifted
    // update H(z0 + g) = H x lies in the tangent space at H z0.
    const auto sig = hankel::random_signal(41, 2, 5);
    std::vector<Index> all(41);
    std::iota(all.begin(), all.end(), 0);
    const auto obs = hankel::observe(sig.x, all);
    hankel::FihtOptions o;
    o.init = ComplexVector(0.5 * sig.x);
    o.step = hankel::StepKind::Constant;
    o.alpha = 1.0;
    o.max_iters = 1;
    o.tol = 1e-300;
    const auto fiht = hankel::fiht_solve(obs, 2, o);
    o.mode = hankel::Mode::Iht;
    const auto iht = hankel::fiht_solve(obs, 2, o);
    EXPECT_LE((fiht.estimate - iht.estimate).norm(), 1e-10 * sig.x.norm());
    EXPECT_LE((fiht.estimate - sig.x).norm(), 1e-10 * sig.x.norm());
}

TEST(Fiht, ExactStepIsOneForIhtUnderFullObservation)
{
    const auto sig = hankel::random_signal(31, 2, 6);
    std::vector<Index> all(31);
    std::iota(all.begin(), all.end(), 0);
    const auto obs = hankel::observe(sig.x, all);
    Rng rng(6);
    const ComplexVector a = random_complex(31, rng), g = random_complex(31, rng);
    // Line search along g from a with target x; on full observation the
    // optimal step recovers the projection coefficient.
    const ComplexVector x = a + Complex(0.7) * g;
    EXPECT_NEAR(hankel::detail::line_search(hankel::observe(x, all), a, g), 0.7, 1e-12);
    (void)obs;
}

TEST(Fiht, ResidualRoughlyMonotone)
{
    const Index n = 127;
    const auto sig = hankel::random_signal(n, 3, 7);
    hankel::FihtOptions o;
    o.truth = sig.x;
    const auto rep = hankel::fiht_solve(
        hankel::observe(sig.x, hankel::random_support(n, 38, 7)), 3, o);
    EXPECT_LE(rep.final_rel_error(), 1e-4);
    for (std::size_t k = 1; k < std::min<std::size_t>(21, rep.trace.size()); ++k)
        EXPECT_LE(rep.trace[k].rel_residual, 1.1 * rep.trace[k - 1].rel_residual) << k;
}

TEST(Fiht, RankValidation)
{
    const auto sig = hankel::random_signal(9, 1, 0);
    std::vector<Index> all(9);
    std::iota(all.begin(), all.end(), 0);
    try {
        hankel::fiht_solve(hankel::observe(sig.x, all), 5);
        FAIL() << "expected InvalidRank";
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidRank);
    }
}

TEST(Hankel, SignalCsvRoundTrip)
{
    const auto sig = hankel::random_signal(20, 2, 8);
    const auto omega = hankel::random_support(20, 7, 8);
    std::stringstream ss;
    hankel::write_signal_csv(ss, sig.x, &omega);
    const auto obs = hankel::read_signal_csv(ss, 20);
    EXPECT_EQ(obs.n, 20);
    EXPECT_EQ(obs.omega, omega);
    for (std::size_t l = 0; l < omega.size(); ++l)
        EXPECT_EQ(obs.values[static_cast<Index>(l)], sig.x[omega[l]]);
    std::stringstream bad("index,re,im\n0,1,2\nnot a number\n");
    EXPECT_THROW(hankel::read_signal_csv(bad), Error);
}

//------------------------------------------------------------------------------
// rpca
//------------------------------------------------------------------------------

TEST(Rpca, NoSparsePartConvergesInOneIteration)
{
    auto P = generate_rpca(30, 2, 0.0, 1);
    for (int algo = 0; algo < 2; ++algo) {
        const auto rep = algo == 0 ? altproj_solve(P) : accaltproj_solve(P);
        EXPECT_EQ(rep.status, Status::Converged);
        EXPECT_EQ(rep.iterations(), 1u);
        EXPECT_LE((rep.estimate.lowrank.dense() - P.lowrank_truth->dense()).norm(),
                  1e-10 * P.D.norm());
        EXPECT_EQ(rep.estimate.sparse.norm(), 0.0);
    }
}

TEST(Rpca, SingleSpikeResidual)
{
    RpcaInstance P;
    P.D = Matrix::Zero(4, 4);
    P.D(0, 1) = 5.0;
    P.r = 1;
    const auto rep = altproj_solve(P, {0.6, 0.6});
    const Matrix resid = P.D - rep.estimate.lowrank.dense() - rep.estimate.sparse;
    EXPECT_LE(resid.norm(), 1e-8);
}

TEST(Rpca, TruthIsAFixedPoint)
{
    const auto P0 = generate_rpca(40, 2, 0.05, 2);
    RpcaOptions o;
    o.init_sparse = *P0.sparse_truth;
    o.max_iters = 1;
    const ThresholdSchedule sched{1e-3, 0.6};
    for (int algo = 0; algo < 2; ++algo) {
        const auto rep = algo == 0 ? altproj_solve(P0, sched, o) : accaltproj_solve(P0, sched, o);
        EXPECT_LE((rep.estimate.lowrank.dense() - P0.lowrank_truth->dense()).norm(),
                  1e-10 * P0.D.norm());
        const Matrix &S = rep.estimate.sparse, &Y = *P0.sparse_truth;
        EXPECT_TRUE(((S.array() != 0.0) == (Y.array() != 0.0)).all());
        EXPECT_LE((S - Y).norm(), 1e-10 * Y.norm());
    }
}

TEST(Rpca, SparseIterateIsExactCopyOfResidual)
{
    const auto P = generate_rpca(50, 3, 0.05, 3);
    RpcaOptions o;
    o.max_iters = 5;
    for (int algo = 0; algo < 2; ++algo) {
        const auto rep = algo == 0 ? altproj_solve(P, {}, o) : accaltproj_solve(P, {}, o);
        const Matrix DZ = P.D - rep.estimate.lowrank.dense();
        const Matrix &S = rep.estimate.sparse;
        for (Index j = 0; j < S.cols(); ++j)
            for (Index i = 0; i < S.rows(); ++i)
                if (S(i, j) != 0.0) {
                    ASSERT_EQ(S(i, j), DZ(i, j));
                    ASSERT_EQ(DZ(i, j) - S(i, j), 0.0);
                }
        EXPECT_EQ(rep.estimate.lowrank.rank(), 3);
    }
}

TEST(Rpca, AccAltProjUpdateMatchesDenseOracle)
{
    const auto P = generate_rpca(40, 3, 0.05, 4);
    RpcaOptions one;
    one.max_iters = 1;
    const auto first = accaltproj_solve(P, {}, one);
    const TangentSpace T0(truncate_rank(P.D, 3));
    const Matrix PT = densify(T0, project_tangent(T0, P.D));
    EXPECT_LE((first.estimate.lowrank.dense() - truncate_rank(PT, 3).dense()).norm(),
              1e-10 * P.D.norm());

    RpcaOptions two;
    two.max_iters = 2;
    const auto second = accaltproj_solve(P, {}, two);
    const TangentSpace T1(first.estimate.lowrank);
    const Matrix W = P.D - first.estimate.sparse;
    const Matrix PT1 = densify(T1, project_tangent(T1, W));
    EXPECT_LE((second.estimate.lowrank.dense() - truncate_rank(PT1, 3).dense()).norm(),
              1e-10 * P.D.norm());
}

TEST(Rpca, Validation)
{
    RpcaInstance P;
    P.D = Matrix::Identity(3, 3);
    P.r = 3;
    EXPECT_THROW(altproj_solve(P), Error);
    P.r = 1;
    EXPECT_THROW(altproj_solve(P, {0.1, 1.5}), Error);
}

//------------------------------------------------------------------------------
// bench harness
//------------------------------------------------------------------------------

TEST(Bench, ParsesStepsizeAndSeeds)
{
    EXPECT_EQ(bench::parse_stepsize("niht").kind, bench::StepOverride::Kind::Niht);
    const auto c = bench::parse_stepsize("const:0.25");
    EXPECT_EQ(c.kind, bench::StepOverride::Kind::Constant);
    EXPECT_EQ(c.value, 0.25);
    EXPECT_THROW(bench::parse_stepsize("const:abc"), Error);
    EXPECT_THROW(bench::parse_stepsize("fast"), Error);
    const std::vector<std::uint64_t> seeds{0, 1, 2, 7};
    EXPECT_EQ(bench::parse_seeds("0-2,7"), seeds);
}

TEST(Bench, ConfigFileAndErrors)
{
    std::stringstream ss("# comment\nmodel = sensing\nn = 20\nr = 2\nrho = 2.5\n"
                         "solvers = rgrad, rcg\nseeds = 1-3\nstepsize = niht\n");
    const auto c = bench::parse_config(ss);
    EXPECT_EQ(c.model, Model::Sensing);
    EXPECT_EQ(c.measurements(), static_cast<Index>(std::ceil(2.5 * 38 * 2)));
    EXPECT_EQ(c.solvers.size(), 2u);
    EXPECT_EQ(c.seeds.size(), 3u);
    bench::validate(c);

    auto expect_config_error = [](auto &&f) {
        try {
            f();
            FAIL() << "expected ConfigError";
        } catch (const Error &e) {
            EXPECT_EQ(e.code(), ErrorCode::ConfigError);
        }
    };
    bench::ExperimentConfig bad;
    expect_config_error([&] { bench::apply_setting(bad, "colour", "red"); });
    expect_config_error([&] { bench::apply_setting(bad, "n", "ten"); });
    expect_config_error([&] { bench::apply_setting(bad, "model", "tensor"); });
    bad.solvers = {"nope"};
    expect_config_error([&] { bench::run_experiment(bad); });
    bad.solvers = {"wf"};
    expect_config_error([&] { bench::validate(bad); });
    bad = {};
    bad.rho = -1;
    expect_config_error([&] { bench::validate(bad); });
}

TEST(Bench, FullObservationRunsFinishQuickly)
{
    bench::ExperimentConfig c;
    c.model = Model::Completion;
    c.n = 15;
    c.r = 2;
    c.m = 225;
    c.sampling = Sampling::Full;
    c.solvers = {"rgrad", "rcg", "iht", "niht", "pgd"};
    c.seeds = {3};
    c.out_dir = std::filesystem::temp_directory_path() / "lrmr_bench_full";
    std::filesystem::remove_all(c.out_dir);
    const auto res = bench::run_experiment(c);
    ASSERT_EQ(res.runs.size(), 5u);
    for (const auto &r : res.runs) {
        EXPECT_TRUE(bench::succeeded(r, c.success_threshold)) << r.solver;
        EXPECT_LE(r.iterations(), 2u) << r.solver;
    }
    std::ifstream summary(c.out_dir / "summary.csv");
    std::string header;
    std::getline(summary, header);
    EXPECT_EQ(header, "solver,seed,iters,converged,final_rel_residual,final_rel_error,elapsed_ms");
    int rows = 0;
    for (std::string line; std::getline(summary, line);)
        ++rows;
    EXPECT_EQ(rows, 5);
    EXPECT_TRUE(std::filesystem::exists(c.out_dir / "trace_rcg_seed3.csv"));
    EXPECT_TRUE(std::filesystem::exists(c.out_dir / "curves.csv"));
    std::filesystem::remove_all(c.out_dir);
}

std::string strip_timing(const std::filesystem::path &p)
{
    std::ifstream is(p);
    std::string out, line;
    while (std::getline(is, line))
        out += line.substr(0, line.rfind(',')) + '\n';
    return out;
}

TEST(Bench, RunsAreDeterministic)
{
    bench::ExperimentConfig c;
    c.model = Model::Sensing;
    c.n = 12;
    c.r = 2;
    c.rho = 3;
    c.solvers = {"rgrad", "pgd", "niht"};
    c.seeds = {0, 1};
    const auto base = std::filesystem::temp_directory_path() / "lrmr_bench_det";
    std::filesystem::remove_all(base);
    c.out_dir = base / "a";
    bench::run_experiment(c);
    c.out_dir = base / "b";
    bench::run_experiment(c);
    for (const auto &entry : std::filesystem::directory_iterator(base / "a")) {
        const auto name = entry.path().filename();
        if (name == "aggregate.csv")
            continue; // wall-clock means only
        EXPECT_EQ(strip_timing(base / "a" / name), strip_timing(base / "b" / name)) << name;
    }
    std::filesystem::remove_all(base);
}

TEST(Bench, CurvesAggregateActiveRuns)
{
    bench::ExperimentConfig c;
    c.solvers = {"x"};
    bench::RunOutcome a{"x", 0, {{0, 1.0}, {1, 0.5}}, Status::Converged};
    bench::RunOutcome b{"x", 1, {{0, 3.0}}, Status::Converged};
    const auto curves = bench::residual_curves(c, {a, b});
    ASSERT_EQ(curves.size(), 2u);
    EXPECT_DOUBLE_EQ(curves[0].mean, 2.0);
    EXPECT_DOUBLE_EQ(curves[0].stddev, 1.0);
    EXPECT_EQ(curves[1].runs, 1u);
    EXPECT_DOUBLE_EQ(curves[1].mean, 0.5);
}

TEST(Bench, GridFullCellAndUnderdeterminedCell)
{
    bench::GridSpec full;
    full.model = Model::Completion;
    full.n = 10;
    full.ranks = {2};
    full.ms = {100};
    full.trials = 3;
    const auto a = bench::phase_grid(full);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].successes, a[0].trials);

    bench::GridSpec low;
    low.model = Model::Sensing;
    low.n = 30;
    low.ranks = {2};
    low.ms = {100}; // (2n - r) r = 116
    low.trials = 10;
    const auto b = bench::phase_grid(low);
    EXPECT_LE(b[0].successes, 1u);

    std::stringstream ss;
    bench::write_grid_csv(ss, b);
    EXPECT_EQ(ss.str().substr(0, 20), "r,m,successes,trials");
}

TEST(Bench, MonotoneWithSlack)
{
    using C = bench::GridCell;
    EXPECT_TRUE(bench::monotone_with_slack({{2, 10, 0, 5}, {2, 20, 3, 5}, {2, 30, 5, 5}}));
    EXPECT_TRUE(bench::monotone_with_slack({{2, 10, 2, 5}, {2, 20, 1, 5}, {2, 30, 5, 5}}));
    EXPECT_FALSE(bench::monotone_with_slack(
        {C{2, 10, 2, 5}, C{2, 20, 1, 5}, C{2, 30, 5, 5}, C{2, 40, 4, 5}}));
}

} // namespace
