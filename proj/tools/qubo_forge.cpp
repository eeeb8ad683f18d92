// Copyright 2026 The qubo-forge Authors
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

// Command-line front end: solve, compare, compile and the dataset generators.

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qubo_forge/qubo_forge.hpp"

namespace fs = std::filesystem;
using namespace qubo_forge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct InputOptions {
    std::string path;
    std::string format = "auto";  // auto | problem | knapsack | regression
    std::size_t features = 0;
    double w_min = -0.25;
    double w_max = 0.25;
    double precision = 0.25;
};

struct PipelineOptions {
    // compile
    std::string lambda_method;
    std::vector<double> lambdas;
    std::optional<double> hard_multiplier, weak_multiplier, slack_precision;
    // solver
    std::string solver = "sa";
    std::optional<std::size_t> runs, sweeps, layers, shots, threads, max_iters;
    std::optional<std::uint64_t> seed;
    std::optional<double> beta_start, beta_end;
    bool no_beta_scaling = false;
    bool time = false;
    // lambda update
    std::string lambda_update = "none";
    std::optional<double> lambda_max;
    std::size_t trials = 5;
    bool update_all = false;
    // analysis
    std::optional<double> val_ref;
    double p_conf = 0.99;
    bool include_weak = false;
    std::string out_dir = ".";
};

struct LoadedInput {
    Problem problem;
    json compile_section;
    json solver_section;
    std::string stem;
};

LoadedInput load_input(const InputOptions& in) {
    LoadedInput out;
    out.stem = fs::path(in.path).stem().string();
    std::string format = in.format;
    if (format == "auto") {
        const auto ext = fs::path(in.path).extension().string();
        format = ext == ".json" ? "problem" : ext == ".csv" ? "regression" : "knapsack";
    }
    if (format == "problem") {
        const json doc = detail::parse_json(detail::read_file(in.path), in.path);
        out.problem = problem_from_json(doc);
        if (doc.contains("compile")) out.compile_section = doc.at("compile");
        if (doc.contains("solver")) out.solver_section = doc.at("solver");
    } else if (format == "knapsack") {
        out.problem = knapsack_problem(load_knapsack(in.path));
    } else if (format == "regression") {
        const auto data = load_regression_csv(in.path, in.features);
        for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";
        out.problem = regression_problem(data, in.w_min, in.w_max, in.precision);
    } else {
        throw Error("unknown input format '" + format + "'");
    }
    return out;
}

CompileConfig compile_config(const LoadedInput& in, const PipelineOptions& o) {
    CompileConfig cfg;
    if (in.compile_section.is_object()) apply_compile_section(in.compile_section, cfg);
    if (!o.lambda_method.empty()) cfg.lambda_method = lambda_method_from_string(o.lambda_method);
    if (!o.lambdas.empty()) {
        cfg.lambda_method = LambdaMethod::manual;
        cfg.manual_lambdas = o.lambdas;
    }
    if (cfg.lambda_method == LambdaMethod::manual && cfg.manual_lambdas.empty())
        throw Error("lambda method 'manual' needs --lambda values");
    if (o.hard_multiplier) cfg.hard_multiplier = *o.hard_multiplier;
    if (o.weak_multiplier) cfg.weak_multiplier = *o.weak_multiplier;
    if (o.slack_precision) {
        cfg.slack_policy = SlackPolicy::explicit_precision;
        cfg.slack_precision = *o.slack_precision;
    }
    return cfg;
}

SolverParams solver_params(const LoadedInput& in, const PipelineOptions& o) {
    SolverParams p;
    if (in.solver_section.is_object()) apply_solver_section(in.solver_section, p);
    if (o.runs) p.runs = *o.runs;
    if (o.seed) p.seed = *o.seed;
    if (o.sweeps) p.sweeps = *o.sweeps;
    if (o.beta_start) p.beta_start = *o.beta_start;
    if (o.beta_end) p.beta_end = *o.beta_end;
    if (o.no_beta_scaling) p.auto_scale_beta = false;
    if (o.layers) p.layers = *o.layers;
    if (o.shots) p.shots = *o.shots;
    if (o.threads) p.threads = *o.threads;
    if (o.max_iters) p.max_optimizer_iters = *o.max_iters;
    if (o.time) p.record_time = true;
    p.validate();
    return p;
}

UpdateStrategy update_strategy(const PipelineOptions& o) {
    UpdateStrategy s;
    s.kind = update_kind_from_string(o.lambda_update);
    if (o.lambda_max) s.lambda_max = *o.lambda_max;
    s.max_trials = o.trials;
    s.update_all = o.update_all;
    s.validate();
    return s;
}

std::string out_dir(const PipelineOptions& o) {
    const char* env = std::getenv("QUBO_FORGE_OUT");
    std::string dir = env && *env ? env : o.out_dir;
    fs::create_directories(dir);
    return dir;
}

std::string format_decoded(const Decoded& d) {
    std::ostringstream out;
    out << "{";
    bool first = true;
    for (const auto& [k, v] : d) {
        out << (first ? "" : ", ") << k << ": " << format_number(v);
        first = false;
    }
    out << "}";
    return out.str();
}

void add_pipeline_flags(CLI::App& cmd, PipelineOptions& o, bool with_solver) {
    if (with_solver)
        cmd.add_option("--solver", o.solver, "exhaustive | sa | qaoa")->check(CLI::IsMember({"exhaustive", "sa", "qaoa"}));
    cmd.add_option("--runs", o.runs, "Independent runs (default 100)");
    cmd.add_option("--seed", o.seed, "Base random seed (default 0)");
    cmd.add_option("--sweeps", o.sweeps, "SA sweeps per run (default 1000)");
    cmd.add_option("--beta-start", o.beta_start, "SA initial inverse temperature");
    cmd.add_option("--beta-end", o.beta_end, "SA final inverse temperature");
    cmd.add_flag("--no-beta-scaling", o.no_beta_scaling, "Use the SA betas as given, without model scaling");
    cmd.add_option("--layers", o.layers, "QAOA layers p (default 1)");
    cmd.add_option("--shots", o.shots, "QAOA shots (default 1024)");
    cmd.add_option("--optimizer-iters", o.max_iters, "QAOA angle optimizer iterations (default 200)");
    cmd.add_option("--threads", o.threads, "Worker threads for SA runs (default: all cores)");
    cmd.add_option("--lambda-method", o.lambda_method,
                   "ub-positive | mqc | vlm | momc | moc | ub-naive | ub-posiform | manual");
    cmd.add_option("--lambda", o.lambdas, "Manual penalty weight(s): one value or one per penalty block");
    cmd.add_option("--hard-multiplier", o.hard_multiplier, "Multiplier of hard-constraint weights (default 1)");
    cmd.add_option("--weak-multiplier", o.weak_multiplier, "Multiplier of weak-constraint weights (default 0.3)");
    cmd.add_option("--slack-precision", o.slack_precision, "Grid step of every inequality slack");
    cmd.add_option("--lambda-update", o.lambda_update, "none | sequential | scaled | binary-search")
        ->check(CLI::IsMember({"none", "sequential", "scaled", "binary-search"}));
    cmd.add_option("--lambda-max", o.lambda_max, "Upper bound of the penalty weight");
    cmd.add_option("--trials", o.trials, "Maximum solve attempts of the lambda update loop (default 5)");
    cmd.add_flag("--update-all", o.update_all, "Raise every penalty weight, not only violated ones");
    cmd.add_option("--val-ref", o.val_ref, "Reference energy for p_range (default: best energy)");
    cmd.add_option("--p-conf", o.p_conf, "Confidence level for time-to-solution (default 0.99)");
    cmd.add_flag("--time", o.time, "Record per-run wall time and report time-to-solution");
    cmd.add_flag("--include-weak", o.include_weak, "Count weak constraints in validity checks");
    cmd.add_option("--out-dir", o.out_dir, "Output directory (QUBO_FORGE_OUT overrides)");
}

void add_input_flags(CLI::App& cmd, InputOptions& in) {
    cmd.add_option("file", in.path, "Problem JSON, knapsack instance or regression CSV")->required();
    cmd.add_option("--input-format", in.format, "auto | problem | knapsack | regression")
        ->check(CLI::IsMember({"auto", "problem", "knapsack", "regression"}));
    cmd.add_option("--features", in.features, "Regression: leading feature columns to use (0: all)");
    cmd.add_option("--w-min", in.w_min, "Regression: lower bound of the weights");
    cmd.add_option("--w-max", in.w_max, "Regression: upper bound of the weights");
    cmd.add_option("--precision", in.precision, "Regression: weight precision");
}

struct SolverRun {
    std::string name;
    LambdaUpdateResult result;
};

SolverRun run_pipeline(const LoadedInput& in, const PipelineOptions& o, const std::string& solver) {
    const CompileConfig cfg = compile_config(in, o);
    const SolverParams params = solver_params(in, o);
    AnalysisOptions analysis;
    analysis.include_weak = o.include_weak;
    analysis.val_ref = o.val_ref;
    analysis.p_conf = o.p_conf;
    return {solver, solve_with_lambda_update(in.problem, cfg, solver_kind_from_string(solver), params,
                                             update_strategy(o), analysis)};
}

void write_outputs(const std::string& dir, const std::string& stem, const SolverRun& run) {
    const std::string base = (fs::path(dir) / (stem + "_" + run.name)).string();
    save_report(base + "_solution.json", run.result.solution, &run.result.report);
    detail::write_file(base + "_cumulative.csv", cumulative_csv(run.result.report.cumulative));
}

int cmd_solve(const InputOptions& input, const PipelineOptions& o) {
    const LoadedInput in = load_input(input);
    const SolverRun run = run_pipeline(in, o, o.solver);
    const auto& r = run.result;
    const std::string dir = out_dir(o);
    write_outputs(dir, in.stem, run);
    detail::write_file((fs::path(dir) / (in.stem + "_model.json")).string(), to_json(r.model).dump(2) + "\n");

    for (const auto& w : r.model.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& w : r.solution.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "solver: " << run.name << "\n";
    std::cout << "best: " << format_decoded(r.report.best_decoded) << "\n";
    std::cout << "energy: " << format_number(r.report.best_energy) << "\n";
    std::cout << "objectives:";
    for (double v : r.report.objective_values) std::cout << " " << format_number(v);
    std::cout << "\n";
    for (const auto& c : r.report.constraint_results)
        std::cout << "constraint " << c.description << ": " << (c.satisfied ? "satisfied" : "violated")
                  << " (residual " << format_number(c.residual) << (c.counted ? "" : ", not counted") << ")\n";
    std::cout << "feasible: " << (r.report.best_feasible ? "yes" : "no") << "\n";
    std::cout << "valid_rate: " << format_number(r.report.valid_rate) << "%\n";
    std::cout << "p_range: " << format_number(r.report.p_range) << "% (val_ref " << format_number(r.report.val_ref)
              << ")\n";
    if (r.report.tts) std::cout << "tts: " << format_number(*r.report.tts) << " s\n";
    std::cout << "lambdas:";
    for (double l : r.lambdas) std::cout << " " << format_number(l);
    std::cout << "\ntrials: " << r.trials << "\n";
    return r.report.best_feasible ? kExitOk : kExitInfeasible;
}

int cmd_compare(const InputOptions& input, const PipelineOptions& o, const std::vector<std::string>& solvers) {
    if (solvers.empty()) throw CLI::ValidationError("--solvers", "at least one solver is required");
    for (const auto& s : solvers) solver_kind_from_string(s);
    const LoadedInput in = load_input(input);
    std::vector<std::future<SolverRun>> jobs;
    for (const auto& s : solvers) jobs.push_back(std::async(std::launch::async, [&, s] { return run_pipeline(in, o, s); }));
    std::vector<SolverRun> runs;
    for (auto& j : jobs) runs.push_back(j.get());

    const std::string dir = out_dir(o);
    std::ostringstream table;
    table << "solver,best_energy,valid_rate,p_range,val_ref,tts\n";
    std::cout << std::left << std::setw(12) << "solver" << std::setw(14) << "best_energy" << std::setw(12)
              << "valid_rate" << std::setw(10) << "p_range" << "tts\n";
    for (const auto& run : runs) {
        write_outputs(dir, in.stem, run);
        const auto& r = run.result.report;
        const std::string tts = r.tts ? format_number(*r.tts) : "";
        table << run.name << "," << format_number(r.best_energy) << "," << format_number(r.valid_rate) << ","
              << format_number(r.p_range) << "," << format_number(r.val_ref) << "," << tts << "\n";
        std::cout << std::left << std::setw(12) << run.name << std::setw(14) << format_number(r.best_energy)
                  << std::setw(12) << format_number(r.valid_rate) << std::setw(10) << format_number(r.p_range)
                  << (tts.empty() ? "-" : tts) << "\n";
    }
    detail::write_file((fs::path(dir) / (in.stem + "_summary.csv")).string(), table.str());
    return kExitOk;
}

int cmd_compile(const InputOptions& input, const PipelineOptions& o) {
    const LoadedInput in = load_input(input);
    const QuboModel model = compile(in.problem, compile_config(in, o));
    const std::string dir = out_dir(o);
    detail::write_file((fs::path(dir) / (in.stem + "_model.json")).string(), to_json(model).dump(2) + "\n");
    detail::write_file((fs::path(dir) / (in.stem + ".qubo")).string(), to_qubo_text(model));
    for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "binaries: " << model.binaries().size() << "\n";
    std::cout << "terms: " << model.quadratic.size() << "\n";
    std::cout << "offset: " << format_number(model.offset) << "\n";
    for (const auto& p : model.penalties)
        std::cout << "penalty " << p.description << ": lambda " << format_number(p.lambda) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qubo-forge: compile constrained problems to QUBO and solve them"};
    app.require_subcommand(1);

    InputOptions input;
    PipelineOptions opts;
    std::vector<std::string> solvers;

    auto* solve_cmd = app.add_subcommand("solve", "Compile, solve and analyze a problem");
    add_input_flags(*solve_cmd, input);
    add_pipeline_flags(*solve_cmd, opts, true);

    auto* compare_cmd = app.add_subcommand("compare", "Run several solvers and summarize them");
    add_input_flags(*compare_cmd, input);
    add_pipeline_flags(*compare_cmd, opts, false);
    compare_cmd->add_option("--solvers", solvers, "Solvers to compare")->required()->delimiter(',');

    auto* compile_cmd = app.add_subcommand("compile", "Write the compiled QUBO model");
    add_input_flags(*compile_cmd, input);
    compile_cmd->add_option("--lambda-method", opts.lambda_method, "Penalty weight method");
    compile_cmd->add_option("--lambda", opts.lambdas, "Manual penalty weight(s)");
    compile_cmd->add_option("--slack-precision", opts.slack_precision, "Grid step of every inequality slack");
    compile_cmd->add_option("--out-dir", opts.out_dir, "Output directory (QUBO_FORGE_OUT overrides)");

    std::size_t items = 10;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    auto* gen_knapsack = app.add_subcommand("gen-knapsack", "Write a random knapsack instance");
    gen_knapsack->add_option("--items", items, "Number of items");
    gen_knapsack->add_option("--seed", gen_seed, "Random seed");
    gen_knapsack->add_option("-o,--output", gen_out, "Output file")->required();

    InputOptions reg;
    auto* gen_regression = app.add_subcommand("gen-regression", "Write a regression problem file from a CSV");
    gen_regression->add_option("csv", reg.path, "Feature columns followed by a label column")->required();
    gen_regression->add_option("--features", reg.features, "Leading feature columns to use (0: all)");
    gen_regression->add_option("--w-min", reg.w_min, "Lower bound of the weights");
    gen_regression->add_option("--w-max", reg.w_max, "Upper bound of the weights");
    gen_regression->add_option("--precision", reg.precision, "Weight precision");
    gen_regression->add_option("-o,--output", gen_out, "Output problem file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }

    try {
        if (*solve_cmd) return cmd_solve(input, opts);
        if (*compare_cmd) return cmd_compare(input, opts, solvers);
        if (*compile_cmd) return cmd_compile(input, opts);
        if (*gen_knapsack) {
            detail::write_file(gen_out, knapsack_text(random_knapsack(items, gen_seed)));
            return kExitOk;
        }
        if (*gen_regression) {
            const auto data = load_regression_csv(reg.path, reg.features);
            for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";
            save_problem(regression_problem(data, reg.w_min, reg.w_max, reg.precision), gen_out);
            return kExitOk;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
