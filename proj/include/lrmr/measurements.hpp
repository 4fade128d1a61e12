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
/// \file measurements.hpp
///
/// Linear measurement ensembles `A : R^{n x n} -> R^m` for the three
/// recovery scenarios, problem-instance generation, and empirical
/// RIP / incoherence diagnostics.
///
/// - Gaussian sensing: `y_l = <A_l, Z>`, entries of `A_l` i.i.d. N(0, 1/m).
///   The `A_l` are stored densely as the rows of one `m x n^2` matrix
///   (column-major vectorisation).
/// - Completion: `y_l = Z(i_l, j_l)`. The index list is a multiset drawn
///   uniformly with replacement; duplicates give duplicate components and
///   summed adjoint entries.
/// - Phase retrieval: `y_l = a_l^T Z a_l` on matrices, `|a_l^T x|^2` on
///   vectors, `a_l ~ N(0, I_n)`.
///
#ifndef LRMR_MEASUREMENTS_HPP
#define LRMR_MEASUREMENTS_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Sparse>

#include "lrmr/core.hpp"
#include "lrmr/io.hpp"
#include "lrmr/linalg.hpp"

namespace lrmr
{

enum class Model
{
    Sensing,
    Completion,
    PhaseRetrieval,
};

inline const char *to_string(Model m)
{
    switch (m) {
    case Model::Sensing: return "sensing";
    case Model::Completion: return "completion";
    case Model::PhaseRetrieval: return "phase";
    }
    return "?";
}

inline Model parse_model(const std::string &s)
{
    if (s == "sensing")
        return Model::Sensing;
    if (s == "completion")
        return Model::Completion;
    if (s == "phase" || s == "phase_retrieval")
        return Model::PhaseRetrieval;
    throw Error(ErrorCode::ConfigError, "unknown model '" + s + "'");
}

using SparseMatrix = Eigen::SparseMatrix<double>;

struct GaussianSensing
{
    Matrix A; // m x n^2, row l is vec(A_l)
    Index n = 0;
};

struct Completion
{
    std::vector<Index> rows;
    std::vector<Index> cols;
    Index n = 0;

    // Compressed pattern of the distinct observed entries, and the slot of
    // each measurement in its value array.
    SparseMatrix pattern;
    std::vector<Index> slot;
    std::vector<double> multiplicity; // per measurement: count of its entry
};

struct PhaseRetrieval
{
    Matrix A; // m x n, row l is a_l^T
};

class MeasurementEnsemble
{
public:
    static MeasurementEnsemble gaussian_sensing(Matrix A_rows, Index n)
    {
        require(n >= 1 && A_rows.rows() >= 1 && A_rows.cols() == n * n,
                ErrorCode::InvalidInput,
                "gaussian_sensing: expected an m x n^2 measurement matrix");
        require(A_rows.allFinite(), ErrorCode::InvalidInput,
                "gaussian_sensing: non-finite measurement matrix");
        MeasurementEnsemble e;
        e.data_ = GaussianSensing{std::move(A_rows), n};
        return e;
    }

    static MeasurementEnsemble completion(std::vector<Index> rows,
                                          std::vector<Index> cols, Index n)
    {
        require(n >= 1 && !rows.empty() && rows.size() == cols.size(),
                ErrorCode::InvalidInput,
                "completion: need n >= 1 and matching nonempty index lists");
        for (std::size_t l = 0; l < rows.size(); ++l)
            require(rows[l] >= 0 && rows[l] < n && cols[l] >= 0 && cols[l] < n,
                    ErrorCode::InvalidInput, "completion: index out of range");
        Completion c;
        c.rows = std::move(rows);
        c.cols = std::move(cols);
        c.n = n;
        build_pattern(c);
        MeasurementEnsemble e;
        e.data_ = std::move(c);
        return e;
    }

    static MeasurementEnsemble phase_retrieval(Matrix A)
    {
        require(A.rows() >= 1 && A.cols() >= 1, ErrorCode::InvalidInput,
                "phase_retrieval: empty measurement matrix");
        require(A.allFinite(), ErrorCode::InvalidInput,
                "phase_retrieval: non-finite measurement vectors");
        MeasurementEnsemble e;
        e.data_ = PhaseRetrieval{std::move(A)};
        return e;
    }

    Model model() const
    {
        if (std::holds_alternative<GaussianSensing>(data_))
            return Model::Sensing;
        if (std::holds_alternative<Completion>(data_))
            return Model::Completion;
        return Model::PhaseRetrieval;
    }

    Index m() const
    {
        return std::visit(
            [](const auto &d) -> Index {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, Completion>)
                    return static_cast<Index>(d.rows.size());
                else
                    return d.A.rows();
            },
            data_);
    }

    Index n() const
    {
        return std::visit(
            [](const auto &d) -> Index {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, PhaseRetrieval>)
                    return d.A.cols();
                else
                    return d.n;
            },
            data_);
    }

    const GaussianSensing &sensing() const { return std::get<GaussianSensing>(data_); }
    const Completion &completion() const { return std::get<Completion>(data_); }
    const PhaseRetrieval &phase() const { return std::get<PhaseRetrieval>(data_); }

    /// The l-th sensing matrix reshaped to n x n.
    Matrix sensing_matrix(Index l) const
    {
        const auto &s = sensing();
        const Vector a = s.A.row(l).transpose();
        return Eigen::Map<const Matrix>(a.data(), s.n, s.n);
    }

    /// True when the index list visits every entry exactly once.
    bool is_full_observation() const
    {
        if (model() != Model::Completion)
            return false;
        const auto &c = completion();
        return static_cast<Index>(c.rows.size()) == c.n * c.n &&
               c.pattern.nonZeros() == c.n * c.n;
    }

private:
    static void build_pattern(Completion &c)
    {
        const auto m = c.rows.size();
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(m);
        for (std::size_t l = 0; l < m; ++l)
            trip.emplace_back(c.rows[l], c.cols[l], 1.0);
        c.pattern.resize(c.n, c.n);
        c.pattern.setFromTriplets(trip.begin(), trip.end());
        c.pattern.makeCompressed();

        c.slot.resize(m);
        c.multiplicity.resize(m);
        const auto *outer = c.pattern.outerIndexPtr();
        const auto *inner = c.pattern.innerIndexPtr();
        for (std::size_t l = 0; l < m; ++l) {
            const Index j = c.cols[l];
            const auto *first = inner + outer[j];
            const auto *last = inner + outer[j + 1];
            const auto *it = std::lower_bound(first, last, c.rows[l]);
            c.slot[l] = static_cast<Index>(it - inner);
            c.multiplicity[l] = c.pattern.valuePtr()[c.slot[l]];
        }
    }

    std::variant<GaussianSensing, Completion, PhaseRetrieval> data_;
};

//------------------------------------------------------------------------------
// forward / adjoint
//------------------------------------------------------------------------------

/// `A(Z)`. For phase retrieval this is the lifted map `a_l^T Z a_l`.
inline Vector forward(const MeasurementEnsemble &E, const Matrix &Z)
{
    const Index n = E.n();
    require(Z.rows() == n && Z.cols() == n, ErrorCode::InvalidInput,
            "forward: Z must be n x n");
    switch (E.model()) {
    case Model::Sensing:
        return E.sensing().A * Eigen::Map<const Vector>(Z.data(), n * n);
    case Model::Completion: {
        const auto &c = E.completion();
        Vector y(E.m());
        for (Index l = 0; l < y.size(); ++l)
            y[l] = Z(c.rows[l], c.cols[l]);
        return y;
    }
    case Model::PhaseRetrieval: {
        const auto &A = E.phase().A;
        return (A * Z).cwiseProduct(A).rowwise().sum();
    }
    }
    return {};
}

/// `A(U diag(sigma) V^T)`, sampling only the needed entries for completion.
inline Vector forward(const MeasurementEnsemble &E, const SvdTriple &Z)
{
    if (E.model() == Model::Completion) {
        const auto &c = E.completion();
        const Matrix US = Z.U * Z.sigma.asDiagonal();
        Vector y(E.m());
        for (Index l = 0; l < y.size(); ++l)
            y[l] = US.row(c.rows[l]).dot(Z.V.row(c.cols[l]));
        return y;
    }
    return forward(E, Z.dense());
}

/// Completion only: `A(L R^T)` sampled from the factors in `O(m r)`.
inline Vector forward_factored(const MeasurementEnsemble &E, const Matrix &L,
                               const Matrix &R)
{
    if (E.model() == Model::Completion) {
        const auto &c = E.completion();
        Vector y(E.m());
        for (Index l = 0; l < y.size(); ++l)
            y[l] = L.row(c.rows[l]).dot(R.row(c.cols[l]));
        return y;
    }
    return forward(E, Matrix(L * R.transpose()));
}

/// Completion only: `A^*(v)` as a sparse matrix (duplicates summed).
inline SparseMatrix adjoint_sparse(const MeasurementEnsemble &E, const Vector &v)
{
    const auto &c = E.completion();
    require(v.size() == E.m(), ErrorCode::InvalidInput,
            "adjoint: vector length must equal m");
    SparseMatrix G = c.pattern;
    std::fill(G.valuePtr(), G.valuePtr() + G.nonZeros(), 0.0);
    for (Index l = 0; l < v.size(); ++l)
        G.valuePtr()[c.slot[l]] += v[l];
    return G;
}

/// `A^*(v) = sum_l v_l A_l`.
inline Matrix adjoint(const MeasurementEnsemble &E, const Vector &v)
{
    require(v.size() == E.m(), ErrorCode::InvalidInput,
            "adjoint: vector length must equal m");
    const Index n = E.n();
    switch (E.model()) {
    case Model::Sensing: {
        const Vector g = E.sensing().A.transpose() * v;
        return Eigen::Map<const Matrix>(g.data(), n, n);
    }
    case Model::Completion: {
        const auto &c = E.completion();
        Matrix G = Matrix::Zero(n, n);
        for (Index l = 0; l < v.size(); ++l)
            G(c.rows[l], c.cols[l]) += v[l];
        return G;
    }
    case Model::PhaseRetrieval: {
        const auto &A = E.phase().A;
        return A.transpose() * v.asDiagonal() * A;
    }
    }
    return {};
}

///
/// `A^*(v)` held in whichever representation is cheap for the ensemble
/// (sparse for completion, dense otherwise), exposing the two products the
/// solvers need.
///
class AdjointImage
{
public:
    AdjointImage(const MeasurementEnsemble &E, const Vector &v)
    {
        if (E.model() == Model::Completion)
            g_ = adjoint_sparse(E, v);
        else
            g_ = adjoint(E, v);
    }

    /// `G * M`
    Matrix times(const Matrix &M) const
    {
        return std::visit([&](const auto &g) -> Matrix { return g * M; }, g_);
    }

    /// `G^T * M`
    Matrix transpose_times(const Matrix &M) const
    {
        return std::visit([&](const auto &g) -> Matrix { return g.transpose() * M; },
                          g_);
    }

    Matrix dense() const
    {
        return std::visit([](const auto &g) -> Matrix { return Matrix(g); }, g_);
    }

    double norm() const
    {
        return std::visit([](const auto &g) { return g.norm(); }, g_);
    }

private:
    std::variant<Matrix, SparseMatrix> g_;
};

/// Phase retrieval vector map `|A x|^2`.
inline Vector intensities(const MeasurementEnsemble &E, const Vector &x)
{
    const auto &A = E.phase().A;
    require(x.size() == A.cols(), ErrorCode::InvalidInput,
            "intensities: dimension mismatch");
    return (A * x).array().square().matrix();
}

///
/// `||A||_2^2`, the top eigenvalue of `A^* A`. Exact for completion
/// (largest multiplicity); otherwise `iters` power-method steps from a
/// fixed pseudo-random start.
///
inline double operator_norm_sq(const MeasurementEnsemble &E, int iters = 50)
{
    if (E.model() == Model::Completion) {
        const auto &m = E.completion().multiplicity;
        return *std::max_element(m.begin(), m.end());
    }
    const Index n = E.n();
    Rng rng(0x5eed);
    Matrix Z = gaussian_matrix(n, n, rng);
    Z /= Z.norm();
    double lambda = 0.0;
    for (int k = 0; k < iters; ++k) {
        Matrix W = adjoint(E, forward(E, Z));
        lambda = W.norm();
        if (lambda == 0.0)
            return 0.0;
        Z = W / lambda;
    }
    return lambda;
}

//------------------------------------------------------------------------------
// problem instances
//------------------------------------------------------------------------------

enum class Sampling
{
    Random, ///< i.i.d. draws (Gaussian ensembles, completion with replacement)
    Full,   ///< completion only: every entry observed once, column-major
};

struct ProblemInstance
{
    Model model = Model::Sensing;
    SvdTriple ground_truth;
    Matrix truth;       ///< dense ground truth X
    Vector signal;      ///< phase retrieval: x with X = x x^T
    MeasurementEnsemble ensemble;
    Vector y;
    Index r = 1;
    std::uint64_t seed = 0;
    Sampling sampling = Sampling::Random;

    Index n() const { return ensemble.n(); }
    Index m() const { return ensemble.m(); }
};

/// Default scaling of the spectral initialisation `T_r(alpha A^*(y))`.
inline double spectral_scale(const MeasurementEnsemble &E)
{
    if (E.model() == Model::Completion)
        return static_cast<double>(E.n()) * static_cast<double>(E.n()) /
               static_cast<double>(E.m());
    return 1.0;
}

namespace detail
{

inline MeasurementEnsemble make_ensemble(Model model, Index n, Index m,
                                         Sampling sampling, Rng &rng)
{
    switch (model) {
    case Model::Sensing:
        return MeasurementEnsemble::gaussian_sensing(
            gaussian_matrix(m, n * n, rng, 1.0 / std::sqrt(static_cast<double>(m))),
            n);
    case Model::Completion: {
        std::vector<Index> rows(m), cols(m);
        if (sampling == Sampling::Full) {
            for (Index l = 0; l < m; ++l) {
                rows[l] = l % n;
                cols[l] = l / n;
            }
        } else {
            std::uniform_int_distribution<Index> pick(0, n * n - 1);
            for (Index l = 0; l < m; ++l) {
                const Index k = pick(rng);
                rows[l] = k % n;
                cols[l] = k / n;
            }
        }
        return MeasurementEnsemble::completion(std::move(rows), std::move(cols), n);
    }
    case Model::PhaseRetrieval:
        return MeasurementEnsemble::phase_retrieval(gaussian_matrix(m, n, rng));
    }
    throw Error(ErrorCode::InvalidInput, "unknown model");
}

inline SvdTriple rank_one_psd(const Vector &x)
{
    SvdTriple t;
    const double nx = x.norm();
    t.U = x / (nx > 0 ? nx : 1.0);
    t.V = t.U;
    t.sigma = Vector::Constant(1, nx * nx);
    detail::canonicalize_signs(t.U, t.V);
    return t;
}

} // namespace detail

///
/// Seeded problem instance. The ground truth is `X = L R^T` with standard
/// Gaussian factors (`X = x x^T` for phase retrieval, which requires
/// `r = 1`); the truth and the ensemble use independent streams derived
/// from `seed`.
///
inline ProblemInstance generate_instance(Model model, Index n, Index r, Index m,
                                         std::uint64_t seed,
                                         Sampling sampling = Sampling::Random)
{
    require(n >= 1 && r >= 1 && r <= n && m >= 1, ErrorCode::InvalidInput,
            "generate_instance: need 1 <= r <= n and m >= 1");
    require(model != Model::PhaseRetrieval || r == 1, ErrorCode::InvalidInput,
            "generate_instance: phase retrieval is rank one");
    require(sampling == Sampling::Random ||
                (model == Model::Completion && m == n * n),
            ErrorCode::InvalidInput,
            "generate_instance: full observation needs completion with m = n^2");

    ProblemInstance P;
    P.model = model;
    P.r = r;
    P.seed = seed;
    P.sampling = sampling;

    Rng truth_rng = derive_rng(seed, 0);
    if (model == Model::PhaseRetrieval) {
        P.signal = gaussian_vector(n, truth_rng);
        P.truth = P.signal * P.signal.transpose();
        P.ground_truth = detail::rank_one_psd(P.signal);
    } else {
        const Matrix L = gaussian_matrix(n, r, truth_rng);
        const Matrix R = gaussian_matrix(n, r, truth_rng);
        P.truth = L * R.transpose();
        P.ground_truth = truncate_rank(P.truth, r);
    }

    Rng ens_rng = derive_rng(seed, 1);
    P.ensemble = detail::make_ensemble(model, n, m, sampling, ens_rng);
    P.y = forward(P.ensemble, P.truth);
    return P;
}

/// Instance with a caller-supplied truth and ensemble.
inline ProblemInstance make_instance(MeasurementEnsemble E, const Matrix &X, Index r)
{
    require(X.rows() == E.n() && X.cols() == E.n(), ErrorCode::InvalidInput,
            "make_instance: X must be n x n");
    ProblemInstance P;
    P.model = E.model();
    P.r = r;
    P.truth = X;
    P.ground_truth = truncate_rank(X, r);
    P.y = forward(E, X);
    P.ensemble = std::move(E);
    if (P.model == Model::PhaseRetrieval)
        P.signal = P.ground_truth.U.col(0) * std::sqrt(P.ground_truth.sigma[0]);
    return P;
}

/// `||Z - X||_F / ||X||_F` against the instance truth; NaN without one.
inline double relative_error(const ProblemInstance &P, const Matrix &Z)
{
    if (P.truth.size() == 0)
        return std::numeric_limits<double>::quiet_NaN();
    const double xn = P.truth.norm();
    const double d = (Z - P.truth).norm();
    if (xn > 0.0)
        return d / xn;
    return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

/// Sign-invariant error `min(||z - x||, ||z + x||) / ||x||`.
inline double phase_error(const Vector &x, const Vector &z)
{
    const double d = std::min((z - x).norm(), (z + x).norm());
    const double xn = x.norm();
    return xn > 0.0 ? d / xn : d;
}

//------------------------------------------------------------------------------
// diagnostics
//------------------------------------------------------------------------------

struct RipInterval
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
};

///
/// Empirical range of `||A(Z)||^2 / ||Z||_F^2` over `trials` random
/// unit-Frobenius rank-`r` probes.
///
/// This is a necessary-condition probe, not a certificate: the true
/// restricted isometry constant can only be larger than what it reports.
/// For completion ensembles with an unobserved entry, the single-spike
/// probe on the first unobserved entry (column-major) is always included.
///
inline RipInterval rip_probe(const MeasurementEnsemble &E, Index r, Index trials,
                             std::uint64_t seed)
{
    require(trials >= 1, ErrorCode::InvalidInput, "rip_probe: trials must be >= 1");
    const Index n = E.n();
    require(r >= 1 && r <= n, ErrorCode::InvalidRank, "rip_probe: bad rank");
    RipInterval out;
    auto account = [&](const Matrix &Z) {
        const double ratio = forward(E, Z).squaredNorm() / Z.squaredNorm();
        out.lo = std::min(out.lo, ratio);
        out.hi = std::max(out.hi, ratio);
    };

    for (Index t = 0; t < trials; ++t) {
        Rng rng = derive_rng(seed, static_cast<std::uint64_t>(t));
        const Matrix L = gaussian_matrix(n, r, rng);
        const Matrix R = gaussian_matrix(n, r, rng);
        Matrix Z = L * R.transpose();
        Z /= Z.norm();
        account(Z);
    }

    if (E.model() == Model::Completion && !E.is_full_observation()) {
        const auto &c = E.completion();
        for (Index j = 0; j < n; ++j) {
            const Index observed = c.pattern.outerIndexPtr()[j + 1] -
                                   c.pattern.outerIndexPtr()[j];
            if (observed == n)
                continue;
            const auto *inner = c.pattern.innerIndexPtr() + c.pattern.outerIndexPtr()[j];
            Index i = 0;
            while (i < observed && inner[i] == i)
                ++i;
            Matrix spike = Matrix::Zero(n, n);
            spike(i, j) = 1.0;
            account(spike);
            break;
        }
    }
    return out;
}

/// Row-norm scan: largest squared row norm of `M`.
inline double max_row_norm_sq(const Matrix &M)
{
    return M.rowwise().squaredNorm().maxCoeff();
}

/// Smallest `mu0` with `||U||_{2,inf}^2, ||V||_{2,inf}^2 <= mu0 r / n`.
inline double incoherence(const SvdTriple &X)
{
    const double n = static_cast<double>(X.U.rows());
    const double r = static_cast<double>(X.rank());
    return n / r * std::max(max_row_norm_sq(X.U), max_row_norm_sq(X.V));
}

//------------------------------------------------------------------------------
// instance serialisation
//------------------------------------------------------------------------------

///
/// Writes `dir/meta` (key=value), `dir/X.mat`, `dir/y.vec` and, for
/// completion, `dir/omega.idx` (1-based "i j" per line). Gaussian
/// ensembles are not stored; `load_instance` regenerates them from the seed.
///
inline void save_instance(const std::filesystem::path &dir, const ProblemInstance &P)
{
    std::filesystem::create_directories(dir);
    {
        auto os = io::open_out(dir / "meta");
        os << "model=" << to_string(P.model) << '\n'
           << "n=" << P.n() << '\n'
           << "r=" << P.r << '\n'
           << "m=" << P.m() << '\n'
           << "seed=" << P.seed << '\n'
           << "sampling=" << (P.sampling == Sampling::Full ? "full" : "random")
           << '\n';
    }
    io::save_matrix(dir / "X.mat", P.truth);
    io::save_vector(dir / "y.vec", P.y);
    if (P.model == Model::Completion) {
        auto os = io::open_out(dir / "omega.idx");
        const auto &c = P.ensemble.completion();
        for (std::size_t l = 0; l < c.rows.size(); ++l)
            os << c.rows[l] + 1 << ' ' << c.cols[l] + 1 << '\n';
    }
}

inline std::map<std::string, std::string> read_key_values(std::istream &is)
{
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

inline ProblemInstance load_instance(const std::filesystem::path &dir)
{
    auto meta_in = io::open_in(dir / "meta");
    const auto kv = read_key_values(meta_in);
    auto get = [&](const char *k) {
        auto it = kv.find(k);
        if (it == kv.end())
            throw Error(ErrorCode::IoError, std::string("meta is missing key ") + k);
        return it->second;
    };
    const Model model = parse_model(get("model"));
    const Index n = std::stol(get("n"));
    const Index r = std::stol(get("r"));
    const Index m = std::stol(get("m"));
    const std::uint64_t seed = std::stoull(get("seed"));
    const Sampling sampling = kv.count("sampling") && kv.at("sampling") == "full"
                                  ? Sampling::Full
                                  : Sampling::Random;

    ProblemInstance P;
    P.model = model;
    P.r = r;
    P.seed = seed;
    P.sampling = sampling;
    P.truth = io::load_matrix(dir / "X.mat");
    P.y = io::load_vector(dir / "y.vec");
    require(P.truth.rows() == n && P.truth.cols() == n, ErrorCode::IoError,
            "X.mat does not match meta n");
    require(P.y.size() == m, ErrorCode::IoError, "y.vec does not match meta m");

    if (model == Model::Completion) {
        auto is = io::open_in(dir / "omega.idx");
        std::vector<Index> rows, cols;
        long i, j;
        while (is >> i >> j) {
            rows.push_back(i - 1);
            cols.push_back(j - 1);
        }
        require(static_cast<Index>(rows.size()) == m, ErrorCode::IoError,
                "omega.idx does not match meta m");
        P.ensemble = MeasurementEnsemble::completion(std::move(rows), std::move(cols), n);
    } else {
        Rng ens_rng = derive_rng(seed, 1);
        P.ensemble = detail::make_ensemble(model, n, m, sampling, ens_rng);
    }
    P.ground_truth = truncate_rank(P.truth, r);
    if (model == Model::PhaseRetrieval)
        P.signal = P.ground_truth.U.col(0) * std::sqrt(P.ground_truth.sigma[0]);
    return P;
}

} // namespace lrmr

#endif // LRMR_MEASUREMENTS_HPP
