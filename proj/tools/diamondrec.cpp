#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "diamondrec/errors.hpp"
#include "diamondrec/geometry.hpp"
#include "diamondrec/harness.hpp"
#include "diamondrec/io.hpp"
#include "diamondrec/norms.hpp"
#include "diamondrec/recovery.hpp"

using namespace diamondrec;

namespace {

void emit(const io::Json& j, const std::string& path) {
    if (path.empty())
        std::cout << j.dump(2) << '\n';
    else
        io::write_json_file(j, path);
}

int cmd_norm(const std::string& input, const std::vector<Index>& dims, double tol, const std::string& report) {
    const io::Json j = io::read_json_file(input);
    const BipartiteOperator X = dims.empty() ? io::bipartite_from_json(j)
                                             : BipartiteOperator(io::matrix_from_json(j), dims[0], dims[1]);
    SquareNormOptions opts;
    opts.solver.tol = tol;
    opts.cross_check = true;
    const SquareNormReport r = square_norm(X, opts);
    io::Json out = io::to_json(r);
    out["nuclear_norm"] = nuclear_norm(X.mat());
    out["extremality"] = io::to_json(extremality_check(X));
    out["dimW"] = X.dimW();
    out["dimV"] = X.dimV();
    emit(out, report);
    return 0;
}

int cmd_recover(const std::string& problem, const std::string& out, const std::string& dump) {
    const RecoveryProblem p = io::recovery_problem_from_json(io::read_json_file(problem));
    if (!dump.empty()) {
        std::ofstream f(dump);
        if (!f) throw IoError("cannot open '" + dump + "' for writing");
        conic::write_triplets(build_recovery_program(p), f);
    }
    const RecoveryResult r = recover(p);
    emit(io::to_json(r), out);
    return r.status == conic::SolveStatus::Optimal ? 0 : 3;
}

int cmd_experiment(const std::string& config, const std::string& out, int threads) {
    ExperimentConfig cfg = io::experiment_config_from_json(io::read_json_file(config));
    if (threads > 0) cfg.threads = threads;
    const ExperimentOutcome res = run_experiment(cfg);
    write_csv(res.rows, out);
    return res.failures.empty() ? 0 : 2;
}

int cmd_geomtest(const std::string& suite, std::uint64_t seed) {
    return geometry::run_suite(suite, seed, std::cout) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Square-norm (diamond-norm) low-rank recovery"};
    app.require_subcommand(1);

    std::string input, report;
    std::vector<Index> dims;
    double tol = 1e-8;
    auto* norm = app.add_subcommand("norm", "Square norm of a bipartite operator");
    norm->add_option("--input", input, "Matrix JSON")->required();
    norm->add_option("--dims", dims, "dimW dimV (overrides the file)")->expected(2);
    norm->add_option("--tol", tol, "Solver tolerance")->check(CLI::PositiveNumber);
    norm->add_option("--report", report, "Write the report here instead of stdout");

    std::string problem, out, dump;
    auto* rec = app.add_subcommand("recover", "Solve a recovery problem");
    rec->add_option("--problem", problem, "Problem JSON")->required();
    rec->add_option("--out", out, "Result JSON (stdout if omitted)");
    rec->add_option("--dump-program", dump, "Write the conic program as triplets");

    std::string config, csv;
    int threads = 0;
    auto* exp = app.add_subcommand("experiment", "Run a phase-transition sweep");
    exp->add_option("--config", config, "Experiment config JSON")->required();
    exp->add_option("--out", csv, "Result CSV")->required();
    exp->add_option("--threads", threads, "Worker threads (overrides the config)")->check(CLI::NonNegativeNumber);

    std::string suite;
    std::uint64_t seed = 1;
    auto* geo = app.add_subcommand("geomtest", "Sampled descent-cone checks");
    geo->add_option("--suite", suite, "Suite name")->required()->check(CLI::IsMember(geometry::suite_names()));
    geo->add_option("--seed", seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*norm) return cmd_norm(input, dims, tol, report);
        if (*rec) return cmd_recover(problem, out, dump);
        if (*exp) return cmd_experiment(config, csv, threads);
        if (*geo) return cmd_geomtest(suite, seed);
    } catch (const std::exception& e) {
        std::cerr << "diamondrec: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
