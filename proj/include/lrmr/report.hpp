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

#ifndef LRMR_REPORT_HPP
#define LRMR_REPORT_HPP

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <vector>

#include "lrmr/core.hpp"

namespace lrmr
{

enum class Status
{
    Converged,
    MaxIters,
    Diverged,
};

inline const char *to_string(Status s)
{
    switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIters: return "max_iters";
    case Status::Diverged: return "diverged";
    }
    return "?";
}

/// One row of a convergence trace. Row 0 describes the initial point.
struct IterTrace
{
    std::size_t iter = 0;
    double rel_residual = 0.0;
    /// Relative error against the ground truth; NaN when no truth is known.
    double rel_error = std::numeric_limits<double>::quiet_NaN();
    double elapsed_ms = 0.0;
};

template <typename Estimate>
struct SolverReport
{
    Estimate estimate{};
    std::vector<IterTrace> trace;
    Status status = Status::MaxIters;

    std::size_t iterations() const { return trace.empty() ? 0 : trace.back().iter; }
    double final_rel_residual() const { return trace.back().rel_residual; }
    double final_rel_error() const { return trace.back().rel_error; }
};

/// Wall-clock stopwatch for trace rows.
class Stopwatch
{
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}

    double elapsed_ms() const
    {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline double safe_ratio(double num, double den)
{
    if (den > 0.0)
        return num / den;
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

/// Trace CSV: `iter,rel_residual,rel_error,elapsed_ms`.
inline void write_trace_csv(std::ostream &os, const std::vector<IterTrace> &trace)
{
    os << "iter,rel_residual,rel_error,elapsed_ms\n";
    os << std::setprecision(17);
    for (const auto &t : trace)
        os << t.iter << ',' << t.rel_residual << ',' << t.rel_error << ','
           << std::setprecision(6) << t.elapsed_ms << std::setprecision(17) << '\n';
}

} // namespace lrmr

#endif // LRMR_REPORT_HPP
