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


// lrmr command-line front end.
//
//   lrmr generate        --model M --n N --r R (--m M | --rho RHO) --seed S --out DIR
//   lrmr solve           --instance DIR --solver ID [--trace FILE]
//   lrmr bench run       [--config FILE] [--set key=value]... [--out-dir DIR]
//   lrmr bench grid      --n N --ranks 2 --ms 100,200 --trials T --out FILE
//   lrmr rpca            --input D.mat --rank R --algo altproj|accaltproj ...
//   lrmr hankel generate --n N --r R --fraction F --seed S --out-signal X.csv --out-obs O.csv
//   lrmr hankel recover  --input O.csv --n N --r R --mode iht|fiht ...
//
// Exit status is 0 on success, 2 for usage or configuration errors, 3 for
// I/O errors and 4 for numerical failures.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrmr/lrmr.hpp"

namespace
{

using namespace lrmr;

int exit_code(ErrorCode c)
{
    switch (c) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidInput:
    case ErrorCode::InvalidRank:
    case ErrorCode::InvalidOptions: return 2;
    case ErrorCode::IoError: return 3;
    default: return 4;
    }
}

std::vector<Index> parse_index_list(const std::string &s, const char *what)
{
    std::vector<Index> out;
    for (const auto &v : bench::parse_seeds(s))
        out.push_back(static_cast<Index>(v));
    if (out.empty())
        throw Error(ErrorCode::ConfigError, std::string(what) + " must be nonempty");
    return out;
}

void write_trace(const std::string &path, const std::vector<IterTrace> &trace)
{
    if (path.empty())
        return;
    auto os = io::open_out(path);
    write_trace_csv(os, trace);
}

void print_report(const char *name, Status status, const std::vector<IterTrace> &trace)
{
    const auto &t = trace.back();
    std::cout << name << ": " << to_string(status) << " after " << t.iter
              << " iterations, rel_residual " << t.rel_residual << ", rel_error "
              << t.rel_error << '\n';
}

struct GenerateArgs
{
    std::string model = "completion";
    Index n = 100, r = 5;
    std::optional<Index> m;
    double rho = 3.0;
    std::uint64_t seed = 0;
    std::string sampling = "random";
    std::string out;
};

struct SolveArgs
{
    std::string instance, solver = "rgrad", trace;
    std::vector<std::string> settings;
};

struct BenchRunArgs
{
    std::string config, out_dir, stepsize, preset;
    std::vector<std::string> settings;
};

struct GridArgs
{
    std::string model = "sensing", ranks = "2", ms, solver = "rgrad", out;
    Index n = 60;
    std::size_t trials = 10, max_iters = 500;
    double threshold = 1e-3, tol = 1e-8;
    std::uint64_t seed = 0;
};

struct RpcaArgs
{
    std::string input, algo = "accaltproj", out_lowrank, out_sparse, trace;
    Index rank = 1;
    double beta = 0.0, gamma = 0.6, tol = 1e-9;
    std::size_t max_iters = 200;
};

struct HankelGenArgs
{
    Index n = 127, r = 3;
    double fraction = 0.3;
    std::uint64_t seed = 0;
    std::string out_signal, out_obs;
};

struct HankelRecoverArgs
{
    std::string input, mode = "fiht", step = "exact", out, trace, truth;
    Index n = 0, r = 1;
    double tol = 1e-8;
    std::size_t max_iters = 500;
};

void apply_settings(bench::ExperimentConfig &c, const std::vector<std::string> &settings)
{
    for (const auto &s : settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError, "--set expects key=value, got '" + s + "'");
        bench::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
    }
}

int run_generate(const GenerateArgs &a)
{
    bench::ExperimentConfig c;
    bench::apply_setting(c, "model", a.model);
    bench::apply_setting(c, "sampling", a.sampling);
    c.n = a.n;
    c.r = a.r;
    c.rho = a.rho;
    c.m = a.m;
    c.solvers = {c.model == Model::PhaseRetrieval ? "wf" : "rgrad"};
    bench::validate(c);
    const auto P = generate_instance(c.model, c.n, c.r, c.measurements(), a.seed, c.sampling);
    save_instance(a.out, P);
    std::cout << "wrote " << a.out << " (m = " << P.m() << ")\n";
    return 0;
}

int run_solve(const SolveArgs &a)
{
    const auto P = load_instance(a.instance);
    bench::ExperimentConfig c;
    c.model = P.model;
    c.n = P.n();
    c.r = P.r;
    c.m = P.m();
    c.sampling = P.sampling;
    c.solvers = {a.solver};
    apply_settings(c, a.settings);
    bench::validate(c);
    std::optional<SvdTriple> init;
    if (c.warm_start > 0 && c.model != Model::PhaseRetrieval)
        init = iht_warm_start(P, c.warm_start);
    const auto o = bench::run_solver(a.solver, P, c, init);
    write_trace(a.trace, o.trace);
    print_report(a.solver.c_str(), o.status, o.trace);
    return 0;
}

int run_bench(const BenchRunArgs &a)
{
    bench::ExperimentConfig c;
    if (!a.config.empty()) {
        auto is = io::open_in(a.config);
        c = bench::parse_config(is);
    }
    apply_settings(c, a.settings);
    if (!a.stepsize.empty())
        bench::apply_setting(c, "stepsize", a.stepsize);
    if (!a.preset.empty())
        bench::apply_setting(c, "preset", a.preset);
    if (!a.out_dir.empty())
        c.out_dir = a.out_dir;
    const auto res = bench::run_experiment(c);
    bench::write_aggregate_csv(std::cout, c, res.runs);
    return 0;
}

int run_grid(const GridArgs &a)
{
    bench::GridSpec g;
    g.model = [&] {
        try {
            return parse_model(a.model);
        } catch (const Error &) {
            throw Error(ErrorCode::ConfigError, "unknown model '" + a.model + "'");
        }
    }();
    g.n = a.n;
    g.ranks = parse_index_list(a.ranks, "ranks");
    g.ms = parse_index_list(a.ms, "ms");
    g.trials = a.trials;
    g.threshold = a.threshold;
    g.solver = a.solver;
    g.seed = a.seed;
    g.tol = a.tol;
    g.max_iters = a.max_iters;
    const auto cells = bench::phase_grid(g);
    if (a.out.empty()) {
        bench::write_grid_csv(std::cout, cells);
    } else {
        auto os = io::open_out(a.out);
        bench::write_grid_csv(os, cells);
    }
    return 0;
}

int run_rpca(const RpcaArgs &a)
{
    RpcaInstance P;
    P.D = io::load_matrix(a.input);
    P.r = a.rank;
    ThresholdSchedule sched{a.beta, a.gamma};
    RpcaOptions opts;
    opts.tol = a.tol;
    opts.max_iters = a.max_iters;
    const auto rep = a.algo == "altproj" ? altproj_solve(P, sched, opts)
                                         : accaltproj_solve(P, sched, opts);
    if (!a.out_lowrank.empty())
        io::save_matrix(a.out_lowrank, rep.estimate.lowrank.dense());
    if (!a.out_sparse.empty())
        io::save_matrix(a.out_sparse, rep.estimate.sparse);
    write_trace(a.trace, rep.trace);
    print_report(a.algo.c_str(), rep.status, rep.trace);
    return 0;
}

int run_hankel_generate(const HankelGenArgs &a)
{
    require(a.fraction > 0 && a.fraction <= 1, ErrorCode::ConfigError,
            "fraction must be in (0, 1]");
    const auto sig = hankel::random_signal(a.n, a.r, a.seed);
    const auto count =
        std::max<Index>(1, static_cast<Index>(std::llround(a.fraction * static_cast<double>(a.n))));
    const auto omega = hankel::random_support(a.n, count, a.seed);
    if (!a.out_signal.empty()) {
        auto os = io::open_out(a.out_signal);
        hankel::write_signal_csv(os, sig.x);
    }
    auto os = io::open_out(a.out_obs);
    hankel::write_signal_csv(os, sig.x, &omega);
    return 0;
}

int run_hankel_recover(const HankelRecoverArgs &a)
{
    std::optional<Index> n;
    if (a.n > 0)
        n = a.n;
    auto is = io::open_in(a.input);
    const auto obs = hankel::read_signal_csv(is, n);
    hankel::FihtOptions o;
    o.mode = a.mode == "iht" ? hankel::Mode::Iht : hankel::Mode::Fiht;
    o.tol = a.tol;
    o.max_iters = a.max_iters;
    if (a.step == "exact") {
        o.step = hankel::StepKind::Exact;
    } else if (a.step == "rate") {
        o.step = hankel::StepKind::InverseRate;
    } else {
        const auto s = bench::parse_stepsize(a.step);
        if (s.kind != bench::StepOverride::Kind::Constant)
            throw Error(ErrorCode::ConfigError, "hankel --step must be exact, rate or const:VAL");
        o.step = hankel::StepKind::Constant;
        o.alpha = s.value;
    }
    if (!a.truth.empty()) {
        auto ts = io::open_in(a.truth);
        const auto full = hankel::read_signal_csv(ts, obs.n);
        require(static_cast<Index>(full.omega.size()) == obs.n, ErrorCode::IoError,
                "truth file must list every index");
        o.truth = full.values;
    }
    const auto rep = hankel::fiht_solve(obs, a.r, o);
    if (!a.out.empty()) {
        auto os = io::open_out(a.out);
        hankel::write_signal_csv(os, rep.estimate);
    }
    write_trace(a.trace, rep.trace);
    print_report(a.mode.c_str(), rep.status, rep.trace);
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Low-rank matrix recovery toolkit"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto *g = app.add_subcommand("generate", "Generate a problem instance directory");
    g->add_option("--model", gen.model, "sensing, completion or phase")->capture_default_str();
    g->add_option("--n", gen.n)->capture_default_str();
    g->add_option("--r", gen.r)->capture_default_str();
    g->add_option("--m", gen.m, "number of measurements (overrides --rho)");
    g->add_option("--rho", gen.rho, "m = ceil(rho (2n - r) r)")->capture_default_str();
    g->add_option("--seed", gen.seed)->capture_default_str();
    g->add_option("--sampling", gen.sampling, "random or full")->capture_default_str();
    g->add_option("--out", gen.out, "output directory")->required();

    SolveArgs solve;
    auto *s = app.add_subcommand("solve", "Run one solver on a saved instance");
    s->add_option("--instance", solve.instance)->required();
    s->add_option("--solver", solve.solver)->capture_default_str();
    s->add_option("--trace", solve.trace, "trace CSV path");
    s->add_option("--set", solve.settings, "config override key=value");

    auto *b = app.add_subcommand("bench", "Experiments");
    b->require_subcommand(1);
    BenchRunArgs brun;
    auto *br = b->add_subcommand("run", "Run solvers over seeds");
    br->add_option("--config", brun.config, "key = value config file");
    br->add_option("--set", brun.settings, "config override key=value");
    br->add_option("--stepsize", brun.stepsize, "const:VAL, niht or exact");
    br->add_option("--preset", brun.preset, "faithful or bench");
    br->add_option("--out-dir", brun.out_dir);
    GridArgs grid;
    auto *bg = b->add_subcommand("grid", "Success counts over an (r, m) grid");
    bg->add_option("--model", grid.model)->capture_default_str();
    bg->add_option("--n", grid.n)->capture_default_str();
    bg->add_option("--ranks", grid.ranks, "list such as 1-3,5")->capture_default_str();
    bg->add_option("--ms", grid.ms, "measurement counts")->required();
    bg->add_option("--trials", grid.trials)->capture_default_str();
    bg->add_option("--threshold", grid.threshold)->capture_default_str();
    bg->add_option("--solver", grid.solver)->capture_default_str();
    bg->add_option("--seed", grid.seed)->capture_default_str();
    bg->add_option("--tol", grid.tol)->capture_default_str();
    bg->add_option("--max-iters", grid.max_iters)->capture_default_str();
    bg->add_option("--out", grid.out, "grid CSV path (stdout if omitted)");

    RpcaArgs rp;
    auto *rc = app.add_subcommand("rpca", "Robust PCA of a dense matrix");
    rc->add_option("--input", rp.input, "matrix file")->required();
    rc->add_option("--rank", rp.rank)->required();
    rc->add_option("--algo", rp.algo)
        ->check(CLI::IsMember({"altproj", "accaltproj"}))
        ->capture_default_str();
    rc->add_option("--beta", rp.beta, "0 selects 0.6/sqrt(n)")->capture_default_str();
    rc->add_option("--gamma", rp.gamma)->capture_default_str();
    rc->add_option("--tol", rp.tol)->capture_default_str();
    rc->add_option("--max-iters", rp.max_iters)->capture_default_str();
    rc->add_option("--out-lowrank", rp.out_lowrank);
    rc->add_option("--out-sparse", rp.out_sparse);
    rc->add_option("--trace", rp.trace);

    auto *h = app.add_subcommand("hankel", "Spectrally sparse signals");
    h->require_subcommand(1);
    HankelGenArgs hg;
    auto *hgen = h->add_subcommand("generate", "Random damped-exponential signal");
    hgen->add_option("--n", hg.n)->capture_default_str();
    hgen->add_option("--r", hg.r)->capture_default_str();
    hgen->add_option("--fraction", hg.fraction, "observed fraction")->capture_default_str();
    hgen->add_option("--seed", hg.seed)->capture_default_str();
    hgen->add_option("--out-signal", hg.out_signal);
    hgen->add_option("--out-obs", hg.out_obs)->required();
    HankelRecoverArgs hr;
    auto *hrec = h->add_subcommand("recover", "Recover a signal from samples");
    hrec->add_option("--input", hr.input, "observation CSV")->required();
    hrec->add_option("--n", hr.n, "signal length")->required();
    hrec->add_option("--r", hr.r)->required();
    hrec->add_option("--mode", hr.mode)
        ->check(CLI::IsMember({"iht", "fiht"}))
        ->capture_default_str();
    hrec->add_option("--step", hr.step, "exact, rate or const:VAL")->capture_default_str();
    hrec->add_option("--tol", hr.tol)->capture_default_str();
    hrec->add_option("--max-iters", hr.max_iters)->capture_default_str();
    hrec->add_option("--truth", hr.truth, "full signal CSV for the error column");
    hrec->add_option("--out", hr.out);
    hrec->add_option("--trace", hr.trace);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc_parse = app.exit(e);
        return rc_parse == 0 ? 0 : 2;
    }

    try {
        if (*g)
            return run_generate(gen);
        if (*s)
            return run_solve(solve);
        if (*br)
            return run_bench(brun);
        if (*bg)
            return run_grid(grid);
        if (*rc)
            return run_rpca(rp);
        if (*hgen)
            return run_hankel_generate(hg);
        if (*hrec)
            return run_hankel_recover(hr);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 2;
}
