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
/// \file hankel.hpp
///
/// Spectrally sparse signals `x_k = sum_j d_j w_j^k`,
/// `w_j = exp(2 pi i f_j - tau_j)`, and their recovery from a subset of
/// samples through the Hankel lift `[H z]_{ij} = z_{i+j}`.
///
/// `fiht_solve` runs either plain IHT on the lifted matrix or FIHT, which
/// projects the lifted update onto the tangent space of the previous
/// rank-r estimate before truncating:
///
///     g_k     = P_Omega(x - z_k)
///     L_{k+1} = T_r(P_{T_k} H(z_k + alpha_k g_k))      (FIHT)
///     L_{k+1} = T_r(H(z_k + alpha_k g_k))              (IHT)
///     z_{k+1} = H^dagger L_{k+1}
///
/// FIHT forms the lifted matrix only for the initial estimate; afterwards
/// it works with Hankel-times-factor products and the `2r x 2r`
/// retraction core.
///
#ifndef LRMR_HANKEL_HPP
#define LRMR_HANKEL_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lrmr/core.hpp"
#include "lrmr/io.hpp"
#include "lrmr/linalg.hpp"
#include "lrmr/report.hpp"

namespace lrmr::hankel
{

struct HankelShape
{
    Index n1 = 1;
    Index n2 = 1;

    Index n() const { return n1 + n2 - 1; }

    /// `n1 = ceil((n + 1) / 2)`, `n2 = n + 1 - n1`.
    static HankelShape squarest(Index n)
    {
        require(n >= 1, ErrorCode::InvalidInput, "HankelShape: n must be >= 1");
        const Index n1 = (n + 2) / 2;
        return {n1, n + 1 - n1};
    }

    static HankelShape with_rows(Index n, Index n1)
    {
        require(n1 >= 1 && n1 <= n, ErrorCode::InvalidInput,
                "HankelShape: need 1 <= n1 <= n");
        return {n1, n + 1 - n1};
    }

    /// Number of entries on anti-diagonal `k`.
    Index count(Index k) const
    {
        return std::min({k + 1, n1, n2, n() - k});
    }
};

struct SpectralSignal
{
    std::vector<double> freqs;   ///< in [0, 1)
    std::vector<double> damping; ///< tau_j >= 0
    std::vector<Complex> amps;
    ComplexVector x;

    Index n() const { return x.size(); }
    Index rank() const { return static_cast<Index>(freqs.size()); }
};

/// Samples `x_k = sum_j d_j exp((2 pi i f_j - tau_j) k)`, `k = 0..n-1`.
inline SpectralSignal make_signal(Index n, std::vector<double> freqs,
                                  std::vector<double> damping, std::vector<Complex> amps)
{
    require(n >= 1 && !freqs.empty() && freqs.size() == damping.size() &&
                freqs.size() == amps.size(),
            ErrorCode::InvalidInput, "make_signal: mismatched component lists");
    for (std::size_t a = 0; a < freqs.size(); ++a) {
        require(freqs[a] >= 0 && freqs[a] < 1 && damping[a] >= 0, ErrorCode::InvalidInput,
                "make_signal: need f in [0, 1) and tau >= 0");
        for (std::size_t b = 0; b < a; ++b)
            require(freqs[a] != freqs[b], ErrorCode::InvalidInput,
                    "make_signal: frequencies must be distinct");
    }
    SpectralSignal s{std::move(freqs), std::move(damping), std::move(amps), {}};
    s.x = ComplexVector::Zero(n);
    for (std::size_t j = 0; j < s.freqs.size(); ++j) {
        const Complex w = std::exp(Complex(-s.damping[j], 2.0 * std::numbers::pi * s.freqs[j]));
        Complex p = s.amps[j];
        for (Index k = 0; k < n; ++k, p *= w)
            s.x[k] += p;
    }
    return s;
}

struct SignalParams
{
    /// Minimum wrap-around separation between frequencies, in units of 1/n.
    double min_separation = 1.5;
    double max_damping = 0.01;
    double amp_lo = 1.0;
    double amp_hi = 2.0;
};

/// Random separated frequencies, dampings in `[0, max_damping]` and
/// amplitudes with modulus in `[amp_lo, amp_hi]` and uniform phase.
inline SpectralSignal random_signal(Index n, Index r, std::uint64_t seed,
                                    const SignalParams &p = {})
{
    require(n >= 1 && r >= 1, ErrorCode::InvalidInput, "random_signal: need n, r >= 1");
    const double sep = p.min_separation / static_cast<double>(n);
    require(sep * static_cast<double>(r) < 1.0, ErrorCode::InvalidInput,
            "random_signal: separation too large for r components");
    Rng rng = derive_rng(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> f;
    while (static_cast<Index>(f.size()) < r) {
        const double c = unit(rng);
        const bool ok = std::all_of(f.begin(), f.end(), [&](double g) {
            const double d = std::abs(c - g);
            return std::min(d, 1.0 - d) >= sep;
        });
        if (ok)
            f.push_back(c);
    }
    std::vector<double> tau(r);
    std::vector<Complex> d(r);
    for (Index j = 0; j < r; ++j) {
        tau[j] = p.max_damping * unit(rng);
        const double mod = p.amp_lo + (p.amp_hi - p.amp_lo) * unit(rng);
        d[j] = std::polar(mod, 2.0 * std::numbers::pi * unit(rng));
    }
    return make_signal(n, std::move(f), std::move(tau), std::move(d));
}

//------------------------------------------------------------------------------
// lift, pseudo-inverse, adjoint
//------------------------------------------------------------------------------

inline void check_shape(Index n, const HankelShape &s)
{
    require(s.n1 >= 1 && s.n2 >= 1 && s.n() == n, ErrorCode::InvalidInput,
            "hankel: shape must satisfy n1 + n2 = n + 1");
}

inline ComplexMatrix hankel_lift(const ComplexVector &z, const HankelShape &s)
{
    check_shape(z.size(), s);
    ComplexMatrix M(s.n1, s.n2);
    for (Index j = 0; j < s.n2; ++j)
        for (Index i = 0; i < s.n1; ++i)
            M(i, j) = z[i + j];
    return M;
}

/// Anti-diagonal sums, the adjoint of `hankel_lift`.
inline ComplexVector hankel_adjoint(const ComplexMatrix &M, const HankelShape &s)
{
    require(M.rows() == s.n1 && M.cols() == s.n2, ErrorCode::InvalidInput,
            "hankel_adjoint: matrix does not match shape");
    ComplexVector z = ComplexVector::Zero(s.n());
    for (Index j = 0; j < s.n2; ++j)
        for (Index i = 0; i < s.n1; ++i)
            z[i + j] += M(i, j);
    return z;
}

/// Anti-diagonal averages, the Moore-Penrose pseudo-inverse of `hankel_lift`.
inline ComplexVector hankel_pinv(const ComplexMatrix &M, const HankelShape &s)
{
    ComplexVector z = hankel_adjoint(M, s);
    for (Index k = 0; k < z.size(); ++k)
        z[k] /= static_cast<double>(s.count(k));
    return z;
}

/// `H^dagger(P Q^H)` without forming the product.
inline ComplexVector hankel_pinv_factored(const ComplexMatrix &P, const ComplexMatrix &Q,
                                          const HankelShape &s)
{
    require(P.rows() == s.n1 && Q.rows() == s.n2 && P.cols() == Q.cols(),
            ErrorCode::InvalidInput, "hankel_pinv_factored: factor shapes");
    ComplexVector z = ComplexVector::Zero(s.n());
    const ComplexMatrix Pt = P.transpose();
    const ComplexMatrix Qh = Q.adjoint();
    for (Index j = 0; j < s.n2; ++j)
        for (Index i = 0; i < s.n1; ++i)
            z[i + j] += Pt.col(i).cwiseProduct(Qh.col(j)).sum();
    for (Index k = 0; k < z.size(); ++k)
        z[k] /= static_cast<double>(s.count(k));
    return z;
}

/// `(H z) X` for an `n2 x k` matrix `X`.
inline ComplexMatrix hankel_times(const ComplexVector &z, const HankelShape &s,
                                  const ComplexMatrix &X)
{
    check_shape(z.size(), s);
    require(X.rows() == s.n2, ErrorCode::InvalidInput, "hankel_times: shape");
    ComplexMatrix out = ComplexMatrix::Zero(s.n1, X.cols());
    for (Index i = 0; i < s.n1; ++i)
        out.row(i) = z.segment(i, s.n2).transpose() * X;
    return out;
}

/// `(H z)^H Y` for an `n1 x k` matrix `Y`.
inline ComplexMatrix hankel_adjoint_times(const ComplexVector &z, const HankelShape &s,
                                          const ComplexMatrix &Y)
{
    check_shape(z.size(), s);
    require(Y.rows() == s.n1, ErrorCode::InvalidInput, "hankel_adjoint_times: shape");
    ComplexMatrix out = ComplexMatrix::Zero(s.n2, Y.cols());
    for (Index j = 0; j < s.n2; ++j)
        out.row(j) = z.segment(j, s.n1).adjoint() * Y;
    return out;
}

/// `P_T(H z)` as a tangent vector.
inline TangentVectorT<Complex> project_lift(const TangentSpaceT<Complex> &T,
                                            const ComplexVector &z, const HankelShape &s)
{
    return project_tangent_from_products(T, hankel_times(z, s, T.V),
                                         hankel_adjoint_times(z, s, T.U));
}

/// `H^dagger(U B^H + C V^H)`.
inline ComplexVector pinv_tangent(const TangentSpaceT<Complex> &T,
                                  const TangentVectorT<Complex> &W, const HankelShape &s)
{
    const Index k = T.rank();
    ComplexMatrix P(s.n1, 2 * k), Q(s.n2, 2 * k);
    P << T.U, W.C;
    Q << W.B, T.V;
    return hankel_pinv_factored(P, Q, s);
}

//------------------------------------------------------------------------------
// recovery
//------------------------------------------------------------------------------

/// Partial observation of a length-n signal.
struct Observation
{
    Index n = 0;
    std::vector<Index> omega; ///< sorted distinct sample indices
    ComplexVector values;     ///< samples at omega
};

inline Observation observe(const ComplexVector &x, std::vector<Index> omega)
{
    std::sort(omega.begin(), omega.end());
    omega.erase(std::unique(omega.begin(), omega.end()), omega.end());
    require(!omega.empty(), ErrorCode::InvalidInput, "observe: empty index set");
    require(omega.front() >= 0 && omega.back() < x.size(), ErrorCode::InvalidInput,
            "observe: index out of range");
    Observation o{x.size(), std::move(omega), ComplexVector(0)};
    o.values.resize(static_cast<Index>(o.omega.size()));
    for (std::size_t l = 0; l < o.omega.size(); ++l)
        o.values[static_cast<Index>(l)] = x[o.omega[l]];
    return o;
}

/// `count` distinct indices drawn uniformly without replacement.
inline std::vector<Index> random_support(Index n, Index count, std::uint64_t seed)
{
    require(count >= 1 && count <= n, ErrorCode::InvalidInput,
            "random_support: need 1 <= count <= n");
    std::vector<Index> idx(n);
    for (Index k = 0; k < n; ++k)
        idx[k] = k;
    Rng rng = derive_rng(seed, 1);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

enum class Mode
{
    Iht,
    Fiht,
};

enum class StepKind
{
    Exact,       ///< line search on the observed residual of the lifted update
    InverseRate, ///< alpha = n / |Omega|
    Constant,
};

struct FihtOptions
{
    Mode mode = Mode::Fiht;
    StepKind step = StepKind::Exact;
    double alpha = 1.0; ///< Constant rule
    std::optional<HankelShape> shape;
    /// Starting vector; defaults to `H^dagger T_r H((n / |Omega|) P_Omega x)`.
    std::optional<ComplexVector> init;
    double tol = 1e-8;
    std::size_t max_iters = 500;
    /// Ground truth for the trace error column.
    std::optional<ComplexVector> truth;
};

namespace detail
{

inline ComplexVector zero_fill(const Observation &obs)
{
    ComplexVector z = ComplexVector::Zero(obs.n);
    for (std::size_t l = 0; l < obs.omega.size(); ++l)
        z[obs.omega[l]] = obs.values[static_cast<Index>(l)];
    return z;
}

inline ComplexVector restrict(const Observation &obs, const ComplexVector &z)
{
    ComplexVector out(static_cast<Index>(obs.omega.size()));
    for (std::size_t l = 0; l < obs.omega.size(); ++l)
        out[static_cast<Index>(l)] = z[obs.omega[l]];
    return out;
}

/// `argmin_alpha ||P_Omega(x - a - alpha b)||^2`.
inline double line_search(const Observation &obs, const ComplexVector &a,
                          const ComplexVector &b)
{
    const ComplexVector pb = restrict(obs, b);
    const double den = pb.squaredNorm();
    if (!(den > 0.0))
        return 0.0;
    return std::real(pb.dot(obs.values - restrict(obs, a))) / den;
}

} // namespace detail

///
/// Recovers a rank-`r` spectrally sparse signal from `obs`. The estimate is
/// the full length-n signal. `rel_residual` is
/// `||P_Omega(z - x)|| / ||P_Omega x||`.
///
inline SolverReport<ComplexVector> fiht_solve(const Observation &obs, Index r,
                                              const FihtOptions &opts = {})
{
    const Index n = obs.n;
    require(n >= 1 && !obs.omega.empty() &&
                static_cast<Index>(obs.omega.size()) == obs.values.size(),
            ErrorCode::InvalidInput, "fiht_solve: inconsistent observation");
    require(opts.tol > 0 && opts.max_iters >= 1, ErrorCode::InvalidOptions,
            "fiht_solve: need tol > 0 and max_iters >= 1");
    require(opts.step != StepKind::Constant || opts.alpha > 0, ErrorCode::InvalidOptions,
            "fiht_solve: constant step must be positive");
    const HankelShape s = opts.shape ? *opts.shape : HankelShape::squarest(n);
    check_shape(n, s);
    require(r >= 1 && r < std::min(s.n1, s.n2), ErrorCode::InvalidRank,
            "fiht_solve: need 1 <= r < min(n1, n2)");
    require(!opts.truth || opts.truth->size() == n, ErrorCode::InvalidInput,
            "fiht_solve: truth length must equal n");

    const double xnorm = obs.values.norm();
    const double rate = static_cast<double>(n) / static_cast<double>(obs.omega.size());

    SolverReport<ComplexVector> rep;
    ComplexVector &z = rep.estimate;
    Stopwatch clock;

    ComplexSvdTriple L;
    if (opts.init) {
        require(opts.init->size() == n, ErrorCode::InvalidInput,
                "fiht_solve: init length must equal n");
        z = *opts.init;
        L = truncate_rank(hankel_lift(z, s), r);
    } else {
        L = truncate_rank(hankel_lift(ComplexVector(rate * detail::zero_fill(obs)), s), r);
        z = hankel_pinv_factored(L.U * L.sigma.cast<Complex>().asDiagonal(), L.V, s);
    }

    auto record = [&](std::size_t k) {
        const double rr = safe_ratio((detail::restrict(obs, z) - obs.values).norm(), xnorm);
        double err = std::numeric_limits<double>::quiet_NaN();
        if (opts.truth)
            err = safe_ratio((z - *opts.truth).norm(), opts.truth->norm());
        rep.trace.push_back({k, rr, err, clock.elapsed_ms()});
        return rr;
    };
    const double initial = record(0);
    if (initial <= opts.tol) {
        rep.status = Status::Converged;
        return rep;
    }

    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        ComplexVector g = ComplexVector::Zero(n);
        for (std::size_t l = 0; l < obs.omega.size(); ++l)
            g[obs.omega[l]] = obs.values[static_cast<Index>(l)] - z[obs.omega[l]];

        if (opts.mode == Mode::Fiht) {
            const TangentSpaceT<Complex> T(L.U, L.V);
            const auto Wz = project_lift(T, z, s);
            const auto Wg = project_lift(T, g, s);
            double alpha = opts.alpha;
            if (opts.step == StepKind::InverseRate)
                alpha = rate;
            else if (opts.step == StepKind::Exact)
                alpha = detail::line_search(obs, pinv_tangent(T, Wz, s), pinv_tangent(T, Wg, s));
            L = retract(T, Wz + Complex(alpha) * Wg, r);
        } else {
            double alpha = opts.alpha;
            if (opts.step == StepKind::InverseRate)
                alpha = rate;
            else if (opts.step == StepKind::Exact)
                alpha = detail::line_search(obs, z, g);
            L = truncate_rank(hankel_lift(ComplexVector(z + alpha * g), s), r);
        }
        z = hankel_pinv_factored(L.U * L.sigma.cast<Complex>().asDiagonal(), L.V, s);

        const double rr = record(k);
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
// CSV signal files: `index,re,im`
//------------------------------------------------------------------------------

inline void write_signal_csv(std::ostream &os, const ComplexVector &x,
                             const std::vector<Index> *subset = nullptr)
{
    os << "index,re,im\n" << std::setprecision(io::kDigits);
    auto line = [&](Index k) { os << k << ',' << x[k].real() << ',' << x[k].imag() << '\n'; };
    if (subset) {
        for (Index k : *subset)
            line(k);
    } else {
        for (Index k = 0; k < x.size(); ++k)
            line(k);
    }
}

///
/// Reads `index,re,im` lines (a header line is optional). With `n` given,
/// the result is an observation of a length-n signal; otherwise `n` is one
/// past the largest index.
///
inline Observation read_signal_csv(std::istream &is, std::optional<Index> n = std::nullopt)
{
    std::vector<std::pair<Index, Complex>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        long k;
        double re, im;
        if (!(ls >> k >> re >> im)) {
            if (lineno == 1)
                continue; // header
            throw Error(ErrorCode::IoError, "signal csv: bad line " + std::to_string(lineno));
        }
        rows.emplace_back(k, Complex(re, im));
    }
    require(!rows.empty(), ErrorCode::IoError, "signal csv: no samples");
    std::sort(rows.begin(), rows.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    Observation o;
    o.n = n ? *n : rows.back().first + 1;
    require(rows.front().first >= 0 && rows.back().first < o.n, ErrorCode::IoError,
            "signal csv: index out of range");
    o.values.resize(static_cast<Index>(rows.size()));
    for (std::size_t l = 0; l < rows.size(); ++l) {
        require(l == 0 || rows[l].first != rows[l - 1].first, ErrorCode::IoError,
                "signal csv: duplicate index");
        o.omega.push_back(rows[l].first);
        o.values[static_cast<Index>(l)] = rows[l].second;
    }
    return o;
}

} // namespace lrmr::hankel

#endif // LRMR_HANKEL_HPP
