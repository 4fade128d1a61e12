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
/// \file bench.hpp
///
/// Experiment harness: flat `key = value` configuration, solver dispatch by
/// id, seeded runs with trace/summary CSV output, and success-rate grids.
///
/// Every non-timing output is a function of the configuration alone.
///
#ifndef LRMR_BENCH_HPP
#define LRMR_BENCH_HPP

#include <algorithm>
#include <iomanip>
#include <limits>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lrmr/convex.hpp"
#include "lrmr/factored.hpp"
#include "lrmr/manifold.hpp"
#include "lrmr/measurements.hpp"
#include "lrmr/report.hpp"

namespace lrmr::bench
{

inline const std::vector<std::string> &solver_ids()
{
    static const std::vector<std::string> ids{"svt",  "fbs",   "admm", "pgd", "iht",
                                              "niht", "rgrad", "rcg",  "wf",  "rgrad_phase"};
    return ids;
}

struct StepOverride
{
    enum class Kind
    {
        Constant,
        Niht,
        Exact,
    };
    Kind kind = Kind::Exact;
    double value = 0.0;
};

/// Parses `const:VAL`, `niht` or `exact`.
inline StepOverride parse_stepsize(const std::string &s)
{
    if (s == "niht")
        return {StepOverride::Kind::Niht, 0.0};
    if (s == "exact")
        return {StepOverride::Kind::Exact, 0.0};
    if (s.rfind("const:", 0) == 0) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s.substr(6), &used);
            if (used == s.size() - 6 && v > 0 && std::isfinite(v))
                return {StepOverride::Kind::Constant, v};
        } catch (const std::exception &) {
        }
    }
    throw Error(ErrorCode::ConfigError, "bad stepsize '" + s + "' (const:VAL, niht, exact)");
}

enum class Preset
{
    Faithful,
    Bench,
};

inline Preset parse_preset(const std::string &s)
{
    if (s == "faithful")
        return Preset::Faithful;
    if (s == "bench")
        return Preset::Bench;
    throw Error(ErrorCode::ConfigError, "unknown preset '" + s + "'");
}

struct ExperimentConfig
{
    Model model = Model::Completion;
    Index n = 200;
    Index r = 5;
    double rho = 3.0;         ///< m = ceil(rho (2n - r) r)
    std::optional<Index> m;   ///< overrides rho
    Sampling sampling = Sampling::Random;
    std::vector<std::string> solvers{"rgrad"};
    std::vector<std::uint64_t> seeds{0};
    double tol = 1e-6;
    std::size_t max_iters = 1000;
    double success_threshold = 1e-4;
    Preset preset = Preset::Bench;
    std::optional<StepOverride> stepsize;
    std::size_t warm_start = 0; ///< NIHT warm-start iterations, 0 for spectral init
    std::optional<double> lambda;
    double mu = 1.0;
    CgBeta cg_beta = CgBeta::PolakRibierePlus;
    PhaseInitNorm phase_init = PhaseInitNorm::Sqrt;
    std::filesystem::path out_dir;

    Index measurements() const
    {
        if (m)
            return *m;
        const double dof = static_cast<double>((2 * n - r) * r);
        return static_cast<Index>(std::ceil(rho * dof));
    }
};

namespace detail
{

inline std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos)
            out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

template <typename T>
T parse_number(const std::string &key, const std::string &v)
{
    try {
        std::size_t used = 0;
        T out;
        if constexpr (std::is_floating_point_v<T>)
            out = static_cast<T>(std::stod(v, &used));
        else if constexpr (std::is_signed_v<T>)
            out = static_cast<T>(std::stoll(v, &used));
        else {
            if (!v.empty() && v[0] == '-')
                throw std::invalid_argument("negative");
            out = static_cast<T>(std::stoull(v, &used));
        }
        if (used != v.size())
            throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception &) {
        throw Error(ErrorCode::ConfigError, "bad value for " + key + ": '" + v + "'");
    }
}

} // namespace detail

/// `"0-9"`, `"1,4,7"` or mixtures such as `"0-2,10"`.
inline std::vector<std::uint64_t> parse_seeds(const std::string &s)
{
    std::vector<std::uint64_t> out;
    for (const auto &part : detail::split(s, ',')) {
        const auto dash = part.find('-', 1);
        if (dash == std::string::npos) {
            out.push_back(detail::parse_number<std::uint64_t>("seeds", part));
        } else {
            const auto lo = detail::parse_number<std::uint64_t>("seeds", part.substr(0, dash));
            const auto hi = detail::parse_number<std::uint64_t>("seeds", part.substr(dash + 1));
            if (hi < lo)
                throw Error(ErrorCode::ConfigError, "bad seed range '" + part + "'");
            for (auto v = lo; v <= hi; ++v)
                out.push_back(v);
        }
    }
    if (out.empty())
        throw Error(ErrorCode::ConfigError, "seeds must be nonempty");
    return out;
}

/// Applies one `key = value` setting.
inline void apply_setting(ExperimentConfig &c, const std::string &key, const std::string &v)
{
    using detail::parse_number;
    if (key == "model")
        c.model = [&] {
            try {
                return parse_model(v);
            } catch (const Error &) {
                throw Error(ErrorCode::ConfigError, "unknown model '" + v + "'");
            }
        }();
    else if (key == "n")
        c.n = parse_number<Index>(key, v);
    else if (key == "r")
        c.r = parse_number<Index>(key, v);
    else if (key == "rho")
        c.rho = parse_number<double>(key, v);
    else if (key == "m")
        c.m = parse_number<Index>(key, v);
    else if (key == "sampling") {
        if (v != "random" && v != "full")
            throw Error(ErrorCode::ConfigError, "sampling must be random or full");
        c.sampling = v == "full" ? Sampling::Full : Sampling::Random;
    } else if (key == "solvers" || key == "solver")
        c.solvers = detail::split(v, ',');
    else if (key == "seeds")
        c.seeds = parse_seeds(v);
    else if (key == "tol")
        c.tol = parse_number<double>(key, v);
    else if (key == "max_iters")
        c.max_iters = parse_number<std::size_t>(key, v);
    else if (key == "threshold")
        c.success_threshold = parse_number<double>(key, v);
    else if (key == "preset")
        c.preset = parse_preset(v);
    else if (key == "stepsize")
        c.stepsize = parse_stepsize(v);
    else if (key == "warm_start")
        c.warm_start = parse_number<std::size_t>(key, v);
    else if (key == "lambda")
        c.lambda = parse_number<double>(key, v);
    else if (key == "mu")
        c.mu = parse_number<double>(key, v);
    else if (key == "cg_beta") {
        if (v == "prp" || v == "polak_ribiere_plus")
            c.cg_beta = CgBeta::PolakRibierePlus;
        else if (v == "fr" || v == "fletcher_reeves")
            c.cg_beta = CgBeta::FletcherReeves;
        else
            throw Error(ErrorCode::ConfigError, "cg_beta must be prp or fr");
    } else if (key == "phase_init") {
        if (v != "sqrt" && v != "literal")
            throw Error(ErrorCode::ConfigError, "phase_init must be sqrt or literal");
        c.phase_init = v == "sqrt" ? PhaseInitNorm::Sqrt : PhaseInitNorm::Literal;
    } else if (key == "out_dir")
        c.out_dir = v;
    else
        throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
}

/// Checks ranges and solver ids; throws `ConfigError`.
inline void validate(const ExperimentConfig &c)
{
    auto fail = [](const std::string &what) { throw Error(ErrorCode::ConfigError, what); };
    if (c.n < 1 || c.r < 1 || c.r > c.n)
        fail("need 1 <= r <= n");
    if (!c.m && !(c.rho > 0))
        fail("rho must be positive");
    if (c.measurements() < 1)
        fail("m must be >= 1");
    if (c.seeds.empty())
        fail("seeds must be nonempty");
    if (c.solvers.empty())
        fail("solvers must be nonempty");
    if (!(c.tol > 0) || c.max_iters < 1 || !(c.success_threshold > 0))
        fail("need tol > 0, max_iters >= 1 and threshold > 0");
    if (c.model == Model::PhaseRetrieval && c.r != 1)
        fail("phase retrieval requires r = 1");
    if (c.sampling == Sampling::Full &&
        (c.model != Model::Completion || c.measurements() != c.n * c.n))
        fail("full sampling requires completion with m = n^2");
    const auto &ids = solver_ids();
    for (const auto &s : c.solvers) {
        if (std::find(ids.begin(), ids.end(), s) == ids.end())
            fail("unknown solver id '" + s + "'");
        const bool phase_solver = s == "wf" || s == "rgrad_phase";
        if (phase_solver != (c.model == Model::PhaseRetrieval))
            fail("solver '" + s + "' does not support model " + to_string(c.model));
    }
}

inline ExperimentConfig parse_config(std::istream &is, ExperimentConfig base = {})
{
    for (const auto &[k, v] : read_key_values(is))
        apply_setting(base, k, v);
    return base;
}

//------------------------------------------------------------------------------
// dispatch
//------------------------------------------------------------------------------

struct RunOutcome
{
    std::string solver;
    std::uint64_t seed = 0;
    std::vector<IterTrace> trace;
    Status status = Status::MaxIters;

    std::size_t iterations() const { return trace.back().iter; }
    double final_rel_residual() const { return trace.back().rel_residual; }
    double final_rel_error() const { return trace.back().rel_error; }
    double elapsed_ms() const { return trace.back().elapsed_ms; }
};

namespace detail
{

inline ManifoldOptions manifold_options(const ExperimentConfig &c, StepRule default_rule)
{
    ManifoldOptions o;
    o.tol = c.tol;
    o.max_iters = c.max_iters;
    o.cg_beta = c.cg_beta;
    o.phase_init = c.phase_init;
    o.step = default_rule;
    if (c.stepsize) {
        switch (c.stepsize->kind) {
        case StepOverride::Kind::Constant:
            o.step = StepRule::Constant;
            o.alpha = c.stepsize->value;
            break;
        case StepOverride::Kind::Niht: o.step = StepRule::Niht; break;
        case StepOverride::Kind::Exact: o.step = StepRule::Exact; break;
        }
    }
    return o;
}

inline PgdOptions pgd_options(const ExperimentConfig &c)
{
    PgdOptions o = c.preset == Preset::Faithful ? PgdOptions::faithful() : PgdOptions::bench();
    o.tol = c.tol;
    o.max_iters = c.max_iters;
    o.phase_init = c.phase_init;
    if (c.stepsize && c.stepsize->kind == StepOverride::Kind::Constant)
        o.step = PgdStep::constant(c.stepsize->value);
    return o;
}

inline ConvexOptions convex_options(const ExperimentConfig &c)
{
    ConvexOptions o;
    o.tol = c.tol;
    o.max_iters = c.max_iters;
    o.mu = c.mu;
    if (c.stepsize && c.stepsize->kind == StepOverride::Kind::Constant)
        o.step = ConvexStep::constant(c.stepsize->value);
    return o;
}

template <typename Estimate>
RunOutcome outcome(const std::string &id, std::uint64_t seed, SolverReport<Estimate> &&rep)
{
    return {id, seed, std::move(rep.trace), rep.status};
}

} // namespace detail

///
/// Runs solver `id` on `P`. `init` replaces the spectral initialisation of
/// the factored and manifold matrix solvers.
///
inline RunOutcome run_solver(const std::string &id, const ProblemInstance &P,
                             const ExperimentConfig &c,
                             const std::optional<SvdTriple> &init = std::nullopt)
{
    const std::uint64_t seed = P.seed;
    if (id == "svt") {
        auto o = detail::convex_options(c);
        o.lambda = c.lambda ? *c.lambda : 5.0 * static_cast<double>(P.n());
        return detail::outcome(id, seed, svt_solve(P, o));
    }
    if (id == "fbs" || id == "admm") {
        const auto o = detail::convex_options(c);
        const double top = compact_svd(adjoint(P.ensemble, P.y)).sigma[0];
        const double lambda = c.lambda ? *c.lambda : 1e-4 * top;
        if (id == "admm")
            return detail::outcome(id, seed, admm_solve(P, lambda, o));
        // Exact recovery needs small lambda, reached by continuation from
        // a heavily regularised start.
        return detail::outcome(id, seed,
                               fbs_continuation(P, std::max(lambda, 0.5 * top), lambda, 0.25, o));
    }
    if (id == "pgd") {
        auto o = detail::pgd_options(c);
        o.init = init;
        return detail::outcome(id, seed, pgd_solve(P, o));
    }
    if (id == "iht" || id == "niht") {
        auto o = detail::manifold_options(c, id == "niht" ? StepRule::Niht : StepRule::Constant);
        o.init = init;
        return detail::outcome(id, seed, iht_solve(P, o));
    }
    if (id == "rgrad" || id == "rcg") {
        auto o = detail::manifold_options(c, StepRule::Exact);
        o.init = init;
        return detail::outcome(id, seed, id == "rgrad" ? rgrad_solve(P, o) : rcg_solve(P, o));
    }
    if (id == "wf")
        return detail::outcome(id, seed, wirtinger_flow(P, detail::pgd_options(c)));
    if (id == "rgrad_phase")
        return detail::outcome(id, seed,
                               rgrad_phase(P, detail::manifold_options(c, StepRule::Exact)));
    throw Error(ErrorCode::ConfigError, "unknown solver id '" + id + "'");
}

inline bool succeeded(const RunOutcome &o, double threshold)
{
    return o.final_rel_error() <= threshold;
}

//------------------------------------------------------------------------------
// experiments
//------------------------------------------------------------------------------

struct CurvePoint
{
    std::string solver;
    std::size_t iter = 0;
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t runs = 0; ///< runs still active at this iteration
};

struct ExperimentResult
{
    std::vector<RunOutcome> runs;
    std::vector<CurvePoint> curves;
};

inline void write_summary_csv(std::ostream &os, const std::vector<RunOutcome> &runs)
{
    os << "solver,seed,iters,converged,final_rel_residual,final_rel_error,elapsed_ms\n"
       << std::setprecision(17);
    for (const auto &r : runs)
        os << r.solver << ',' << r.seed << ',' << r.iterations() << ','
           << (r.status == Status::Converged ? 1 : 0) << ',' << r.final_rel_residual() << ','
           << r.final_rel_error() << ',' << std::setprecision(6) << r.elapsed_ms()
           << std::setprecision(17) << '\n';
}

inline void write_curves_csv(std::ostream &os, const std::vector<CurvePoint> &curves)
{
    os << "solver,iter,mean_rel_residual,std_rel_residual,runs\n" << std::setprecision(17);
    for (const auto &p : curves)
        os << p.solver << ',' << p.iter << ',' << p.mean << ',' << p.stddev << ',' << p.runs
           << '\n';
}

/// Per solver: successes, runs, mean iterations and mean wall-clock of converged runs.
inline void write_aggregate_csv(std::ostream &os, const ExperimentConfig &c,
                                const std::vector<RunOutcome> &runs)
{
    os << "solver,successes,runs,mean_iters_converged,mean_elapsed_ms_converged\n"
       << std::setprecision(10);
    for (const auto &id : c.solvers) {
        std::size_t total = 0, ok = 0, conv = 0;
        double iters = 0, ms = 0;
        for (const auto &r : runs) {
            if (r.solver != id)
                continue;
            ++total;
            ok += succeeded(r, c.success_threshold) ? 1 : 0;
            if (r.status == Status::Converged) {
                ++conv;
                iters += static_cast<double>(r.iterations());
                ms += r.elapsed_ms();
            }
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        os << id << ',' << ok << ',' << total << ',' << (conv ? iters / conv : nan) << ','
           << (conv ? ms / conv : nan) << '\n';
    }
}

inline std::vector<CurvePoint> residual_curves(const ExperimentConfig &c,
                                               const std::vector<RunOutcome> &runs)
{
    std::vector<CurvePoint> out;
    for (const auto &id : c.solvers) {
        std::size_t longest = 0;
        for (const auto &r : runs)
            if (r.solver == id)
                longest = std::max(longest, r.trace.size());
        for (std::size_t k = 0; k < longest; ++k) {
            CurvePoint p{id, k, 0.0, 0.0, 0};
            double sum = 0, sum2 = 0;
            for (const auto &r : runs) {
                if (r.solver != id || k >= r.trace.size())
                    continue;
                const double v = r.trace[k].rel_residual;
                sum += v;
                sum2 += v * v;
                ++p.runs;
            }
            p.mean = sum / static_cast<double>(p.runs);
            p.stddev = std::sqrt(std::max(0.0, sum2 / static_cast<double>(p.runs) - p.mean * p.mean));
            out.push_back(p);
        }
    }
    return out;
}

///
/// Runs every configured solver on every seed. With `out_dir` set, writes
/// `trace_<solver>_seed<seed>.csv`, `summary.csv`, `curves.csv` and
/// `aggregate.csv` there.
///
inline ExperimentResult run_experiment(const ExperimentConfig &c)
{
    validate(c);
    ExperimentResult res;
    const Index m = c.measurements();
    for (const auto seed : c.seeds) {
        const ProblemInstance P = generate_instance(c.model, c.n, c.r, m, seed, c.sampling);
        std::optional<SvdTriple> init;
        if (c.warm_start > 0 && c.model != Model::PhaseRetrieval)
            init = iht_warm_start(P, c.warm_start);
        for (const auto &id : c.solvers)
            res.runs.push_back(run_solver(id, P, c, init));
    }
    res.curves = residual_curves(c, res.runs);

    if (!c.out_dir.empty()) {
        std::filesystem::create_directories(c.out_dir);
        for (const auto &r : res.runs) {
            auto os = io::open_out(c.out_dir / ("trace_" + r.solver + "_seed" +
                                                std::to_string(r.seed) + ".csv"));
            write_trace_csv(os, r.trace);
        }
        {
            auto os = io::open_out(c.out_dir / "summary.csv");
            write_summary_csv(os, res.runs);
        }
        {
            auto os = io::open_out(c.out_dir / "curves.csv");
            write_curves_csv(os, res.curves);
        }
        auto os = io::open_out(c.out_dir / "aggregate.csv");
        write_aggregate_csv(os, c, res.runs);
    }
    return res;
}

//------------------------------------------------------------------------------
// success-rate grids
//------------------------------------------------------------------------------

struct GridSpec
{
    Model model = Model::Sensing;
    Index n = 60;
    std::vector<Index> ranks{2};
    std::vector<Index> ms;
    std::size_t trials = 10;
    double threshold = 1e-3;
    std::string solver = "rgrad";
    std::uint64_t seed = 0;
    double tol = 1e-8;
    std::size_t max_iters = 500;
};

struct GridCell
{
    Index r = 0;
    Index m = 0;
    std::size_t successes = 0;
    std::size_t trials = 0;
};

/// Instance seed for `(master, cell, trial)`.
inline std::uint64_t cell_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t trial)
{
    Rng rng = derive_rng(master, cell, trial);
    return rng();
}

///
/// Success counts over the `(r, m)` grid, cells in row-major order of
/// `ranks x ms`. Completion cells with `m = n^2` use full observation.
///
inline std::vector<GridCell> phase_grid(const GridSpec &g)
{
    require(g.n >= 1 && !g.ranks.empty() && !g.ms.empty() && g.trials >= 1 &&
                g.threshold > 0,
            ErrorCode::ConfigError, "phase_grid: need nonempty axes, trials and threshold");
    ExperimentConfig c;
    c.model = g.model;
    c.n = g.n;
    c.tol = g.tol;
    c.max_iters = g.max_iters;
    c.success_threshold = g.threshold;
    c.solvers = {g.solver};

    std::vector<GridCell> out;
    std::uint64_t cell = 0;
    for (const Index r : g.ranks) {
        for (const Index m : g.ms) {
            require(r >= 1 && r <= g.n && m >= 1, ErrorCode::ConfigError,
                    "phase_grid: bad cell");
            c.r = r;
            c.m = m;
            c.sampling = g.model == Model::Completion && m == g.n * g.n ? Sampling::Full
                                                                        : Sampling::Random;
            validate(c);
            GridCell gc{r, m, 0, g.trials};
            for (std::size_t t = 0; t < g.trials; ++t) {
                const ProblemInstance P =
                    generate_instance(g.model, g.n, r, m, cell_seed(g.seed, cell, t), c.sampling);
                const RunOutcome o = run_solver(g.solver, P, c);
                gc.successes += succeeded(o, g.threshold) ? 1 : 0;
            }
            out.push_back(gc);
            ++cell;
        }
    }
    return out;
}

inline void write_grid_csv(std::ostream &os, const std::vector<GridCell> &cells)
{
    os << "r,m,successes,trials\n";
    for (const auto &c : cells)
        os << c.r << ',' << c.m << ',' << c.successes << ',' << c.trials << '\n';
}

///
/// True when, within each rank, success counts ordered by increasing `m`
/// decrease at most once.
///
inline bool monotone_with_slack(std::vector<GridCell> cells)
{
    std::stable_sort(cells.begin(), cells.end(), [](const GridCell &a, const GridCell &b) {
        return a.r != b.r ? a.r < b.r : a.m < b.m;
    });
    std::size_t drops = 0;
    for (std::size_t i = 1; i < cells.size(); ++i)
        if (cells[i].r == cells[i - 1].r && cells[i].successes < cells[i - 1].successes)
            ++drops;
    return drops <= 1;
}

} // namespace lrmr::bench

#endif // LRMR_BENCH_HPP
