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

#ifndef LRMR_CORE_HPP
#define LRMR_CORE_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lrmr
{

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

template <typename Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Orthonormality / reconstruction tolerance used by validity checks.
inline constexpr double kOrthoTol = 1e-10;

enum class ErrorCode
{
    InvalidInput,
    InvalidRank,
    InvalidOptions,
    NumericalError,
    StepsizeDegenerate,
    RetractionDegenerate,
    ConfigError,
    IoError,
};

inline const char *to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidRank: return "InvalidRank";
    case ErrorCode::InvalidOptions: return "InvalidOptions";
    case ErrorCode::NumericalError: return "NumericalError";
    case ErrorCode::StepsizeDegenerate: return "StepsizeDegenerate";
    case ErrorCode::RetractionDegenerate: return "RetractionDegenerate";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const char *what)
{
    if (!cond)
        throw Error(code, what);
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived> &m)
{
    return m.allFinite();
}

/// Deterministic 64-bit generator. All randomness in the library flows
/// through this type so that a seed fixes every output.
using Rng = std::mt19937_64;

/// Derive an independent stream from a master seed and a path of integers,
/// e.g. (seed, cell, trial).
template <typename... Ints>
Rng derive_rng(std::uint64_t seed, Ints... path)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path)...};
    return Rng(seq);
}

inline Matrix gaussian_matrix(Index rows, Index cols, Rng &rng,
                              double stddev = 1.0)
{
    std::normal_distribution<double> normal(0.0, stddev);
    Matrix m(rows, cols);
    // fill in column-major order so the stream layout is fixed
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = normal(rng);
    return m;
}

inline Vector gaussian_vector(Index n, Rng &rng, double stddev = 1.0)
{
    return gaussian_matrix(n, 1, rng, stddev);
}

} // namespace lrmr

#endif // LRMR_CORE_HPP
