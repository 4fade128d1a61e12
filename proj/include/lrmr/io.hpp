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

// Plain-text matrix and vector formats.
//
// Matrix: first line "rows cols", then one whitespace-separated row per
// line. Vector: one value per line. Values are written with 17 significant
// digits so a write/read cycle is exact.

#ifndef LRMR_IO_HPP
#define LRMR_IO_HPP

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lrmr/core.hpp"

namespace lrmr::io
{

inline constexpr int kDigits = 17;

inline void write_matrix(std::ostream &os, const Matrix &M)
{
    os << M.rows() << ' ' << M.cols() << '\n';
    os << std::setprecision(kDigits);
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j > 0)
                os << ' ';
            os << M(i, j);
        }
        os << '\n';
    }
}

inline Matrix read_matrix(std::istream &is)
{
    long rows = 0, cols = 0;
    if (!(is >> rows >> cols) || rows < 1 || cols < 1)
        throw Error(ErrorCode::IoError, "matrix header must be 'rows cols'");
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            if (!(is >> M(i, j)))
                throw Error(ErrorCode::IoError, "truncated matrix body");
    if (!M.allFinite())
        throw Error(ErrorCode::InvalidInput, "matrix contains non-finite values");
    return M;
}

inline void write_vector(std::ostream &os, const Vector &v)
{
    os << std::setprecision(kDigits);
    for (Index i = 0; i < v.size(); ++i)
        os << v[i] << '\n';
}

inline Vector read_vector(std::istream &is)
{
    std::vector<double> vals;
    double x;
    while (is >> x)
        vals.push_back(x);
    if (!is.eof())
        throw Error(ErrorCode::IoError, "vector file contains a non-number");
    return Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size()));
}

inline std::ofstream open_out(const std::filesystem::path &p)
{
    std::ofstream os(p);
    if (!os)
        throw Error(ErrorCode::IoError, "cannot open for writing: " + p.string());
    return os;
}

inline std::ifstream open_in(const std::filesystem::path &p)
{
    std::ifstream is(p);
    if (!is)
        throw Error(ErrorCode::IoError, "cannot open for reading: " + p.string());
    return is;
}

inline void save_matrix(const std::filesystem::path &p, const Matrix &M)
{
    auto os = open_out(p);
    write_matrix(os, M);
}

inline Matrix load_matrix(const std::filesystem::path &p)
{
    auto is = open_in(p);
    return read_matrix(is);
}

inline void save_vector(const std::filesystem::path &p, const Vector &v)
{
    auto os = open_out(p);
    write_vector(os, v);
}

inline Vector load_vector(const std::filesystem::path &p)
{
    auto is = open_in(p);
    return read_vector(is);
}

} // namespace lrmr::io

#endif // LRMR_IO_HPP
