#include "diamondrec/io.hpp"

#include <fstream>
#include <set>

#include "diamondrec/errors.hpp"

namespace diamondrec::io {

namespace {

const Json& field(const Json& j, const char* key, const char* ctx) {
    if (!j.is_object()) throw IoError(std::string(ctx) + ": expected a JSON object");
    auto it = j.find(key);
    if (it == j.end()) throw IoError(std::string(ctx) + ": missing key '" + key + "'");
    return *it;
}

template <class T>
T get_as(const Json& j, const char* key, const char* ctx) {
    try {
        return field(j, key, ctx).get<T>();
    } catch (const Json::exception& e) {
        throw IoError(std::string(ctx) + ": key '" + key + "': " + e.what());
    }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const char* ctx) {
    if (!j.contains(key)) return fallback;
    return get_as<T>(j, key, ctx);
}

Index get_index(const Json& j, const char* key, const char* ctx) {
    const auto v = get_as<long long>(j, key, ctx);
    return static_cast<Index>(v);
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const char* ctx) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw IoError(std::string(ctx) + ": unknown key '" + it.key() + "'");
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const char* ctx) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw IoError(std::string(ctx) + ": entry is neither a number nor [re, im]");
}

Json residuals_to_json(const conic::Residuals& r) {
    return {{"primal", r.primal}, {"dual", r.dual}, {"gap", r.gap}};
}

std::pair<Index, Index> dims_from_json(const Json& j, const char* ctx) {
    const Json& d = field(j, "dims", ctx);
    if (!d.is_array() || d.size() != 2 || !d[0].is_number_integer() || !d[1].is_number_integer())
        throw IoError(std::string(ctx) + ": 'dims' must be [dimW, dimV]");
    return {d[0].get<Index>(), d[1].get<Index>()};
}

Field field_from_string(const std::string& s) {
    if (s == "real") return Field::Real;
    if (s == "complex") return Field::Complex;
    throw PreconditionError("unknown field '" + s + "'");
}

}  // namespace

Json to_json(const ComplexMatrix& X) {
    Json data = Json::array();
    for (Index i = 0; i < X.rows(); ++i)
        for (Index k = 0; k < X.cols(); ++k) data.push_back(complex_to_json(X(i, k)));
    return {{"rows", X.rows()}, {"cols", X.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
    const char* ctx = "matrix";
    const Index rows = get_index(j, "rows", ctx);
    const Index cols = get_index(j, "cols", ctx);
    if (rows < 0 || cols < 0) throw ShapeError("matrix: negative dimension");
    const Json& data = field(j, "data", ctx);
    if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols)
        throw ShapeError("matrix: 'data' must hold rows * cols entries");
    ComplexMatrix X(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index k = 0; k < cols; ++k) X(i, k) = complex_from_json(data[static_cast<std::size_t>(i * cols + k)], ctx);
    return X;
}

Json to_json(const BipartiteOperator& X) {
    Json j = to_json(X.mat());
    j["dimW"] = X.dimW();
    j["dimV"] = X.dimV();
    return j;
}

BipartiteOperator bipartite_from_json(const Json& j) {
    return {matrix_from_json(j), get_index(j, "dimW", "bipartite"), get_index(j, "dimV", "bipartite")};
}

Json to_json(const OperatorMap& M) { return {{"choi", to_json(M.choi())}}; }

OperatorMap operator_map_from_json(const Json& j) {
    return OperatorMap(bipartite_from_json(field(j, "choi", "operator map")));
}

Json to_json(const KrausSet& k) {
    Json ops = Json::array();
    for (const auto& K : k.operators) ops.push_back(to_json(K));
    return {{"kraus", std::move(ops)}};
}

KrausSet kraus_from_json(const Json& j) {
    const Json& ops = field(j, "kraus", "kraus set");
    if (!ops.is_array() || ops.empty()) throw IoError("kraus set: 'kraus' must be a nonempty array");
    KrausSet k;
    for (const auto& o : ops) k.operators.push_back(matrix_from_json(o));
    for (const auto& K : k.operators)
        if (K.rows() != k.operators.front().rows() || K.cols() != k.operators.front().cols())
            throw ShapeError("kraus set: operators differ in shape");
    return k;
}

Json vector_to_json(const ComplexVector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

ComplexVector vector_from_json(const Json& j) {
    if (!j.is_array()) throw IoError("vector: expected an array");
    ComplexVector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i], "vector");
    return v;
}

Json to_json(const EnsembleSpec& s) {
    return {{"kind", to_string(s.kind)},
            {"m", s.m},
            {"dims", {s.dimW, s.dimV}},
            {"seed", s.seed},
            {"group", to_string(s.group)},
            {"L", s.deconv_length}};
}

EnsembleSpec ensemble_spec_from_json(const Json& j) {
    const char* ctx = "ensemble spec";
    reject_unknown(j, {"kind", "m", "dims", "seed", "group", "L"}, ctx);
    EnsembleSpec s;
    s.kind = ensemble_kind_from_string(get_as<std::string>(j, "kind", ctx));
    s.m = get_index(j, "m", ctx);
    if (j.contains("dims")) std::tie(s.dimW, s.dimV) = dims_from_json(j, ctx);
    s.seed = get_or<std::uint64_t>(j, "seed", 0, ctx);
    if (j.contains("group")) s.group = unitary_group_from_string(get_as<std::string>(j, "group", ctx));
    s.deconv_length = static_cast<Index>(get_or<long long>(j, "L", 0, ctx));
    if (s.m < 1 || s.dimW < 1 || s.dimV < 1 || s.deconv_length < 0)
        throw PreconditionError("ensemble spec: m and dims must be positive");
    return s;
}

Json export_ensemble(const MeasurementEnsemble& e) {
    Json fs = Json::array();
    for (const auto& A : e.functionals) fs.push_back(to_json(A));
    return {{"spec", to_json(e.spec)}, {"dims", {e.dimW(), e.dimV()}}, {"functionals", std::move(fs)}};
}

MeasurementEnsemble ensemble_from_json(const Json& j) {
    if (j.is_object() && j.contains("functionals")) {
        const auto [dW, dV] = dims_from_json(j, "ensemble");
        const Json& fs = j["functionals"];
        if (!fs.is_array() || fs.empty()) throw IoError("ensemble: 'functionals' must be a nonempty array");
        MeasurementEnsemble e;
        e.spec.dimW = dW;
        e.spec.dimV = dV;
        e.spec.m = static_cast<Index>(fs.size());
        for (const auto& f : fs) {
            ComplexMatrix A = matrix_from_json(f);
            if (A.rows() != dW * dV || A.cols() != dW * dV) throw ShapeError("ensemble: functional has the wrong shape");
            e.functionals.push_back(std::move(A));
        }
        return e;
    }
    return materialize(ensemble_spec_from_json(j));
}

Json to_json(const conic::SolverOptions& o) {
    return {{"tol", o.tol}, {"max_iters", o.max_iters}, {"anderson_memory", o.anderson_memory}};
}

conic::SolverOptions solver_options_from_json(const Json& j) {
    const char* ctx = "solver";
    reject_unknown(j, {"tol", "max_iters", "anderson_memory"}, ctx);
    conic::SolverOptions o;
    o.tol = get_or<double>(j, "tol", o.tol, ctx);
    o.max_iters = get_or<long>(j, "max_iters", o.max_iters, ctx);
    o.anderson_memory = get_or<int>(j, "anderson_memory", o.anderson_memory, ctx);
    if (!(o.tol > 0.0) || o.max_iters < 1 || o.anderson_memory < 0)
        throw PreconditionError("solver: tol and max_iters must be positive");
    return o;
}

RecoveryProblem recovery_problem_from_json(const Json& j) {
    const char* ctx = "recovery problem";
    reject_unknown(j, {"ensemble", "y", "eta", "regularizer", "cpt", "field", "truth", "solver"}, ctx);
    RecoveryProblem p;
    p.ensemble = ensemble_from_json(field(j, "ensemble", ctx));
    if (j.contains("truth")) {
        const BipartiteOperator T = bipartite_from_json(j["truth"]);
        if (T.dimW() != p.ensemble.dimW() || T.dimV() != p.ensemble.dimV())
            throw ShapeError("recovery problem: truth dims differ from the ensemble");
        p.truth = T.mat();
    }
    if (j.contains("y")) {
        p.y = vector_from_json(j["y"]);
    } else if (p.truth) {
        p.y = apply_measurement(p.ensemble, BipartiteOperator(*p.truth, p.ensemble.dimW(), p.ensemble.dimV()));
    } else {
        throw IoError("recovery problem: either 'y' or 'truth' is required");
    }
    if (p.y.size() != p.ensemble.m()) throw ShapeError("recovery problem: y length differs from the ensemble size");
    if (j.contains("eta")) {
        const Json& e = j["eta"];
        if (e.is_string() && e.get<std::string>() == "eps") {
            p.eta = eps_policy_eta(p.y);
        } else if (e.is_number()) {
            p.eta = e.get<double>();
            if (p.eta < 0.0) throw PreconditionError("recovery problem: eta must be nonnegative");
        } else {
            throw IoError("recovery problem: 'eta' must be a number or \"eps\"");
        }
    }
    p.regularizer = regularizer_from_string(get_or<std::string>(j, "regularizer", "square", ctx));
    p.cpt = get_or<bool>(j, "cpt", false, ctx);
    p.field = field_from_string(get_or<std::string>(j, "field", "complex", ctx));
    if (j.contains("solver")) p.solver = solver_options_from_json(j["solver"]);
    return p;
}

Json to_json(const RecoveryResult& r) {
    Json j = {{"estimate", to_json(r.estimate)},
              {"objective", r.objective},
              {"eta_used", r.eta_used},
              {"misfit", r.misfit},
              {"status", conic::to_string(r.status)},
              {"residuals", residuals_to_json(r.residuals)},
              {"iterations", r.iterations},
              {"solve_ms", r.solve_ms}};
    j["frobenius_error"] = r.frobenius_error ? Json(*r.frobenius_error) : Json(nullptr);
    return j;
}

Json to_json(const SquareNormReport& r, bool witnesses) {
    Json j = {{"value", r.value},
              {"primal_value", r.primal_value},
              {"dual_value", r.dual_value},
              {"gap", r.gap},
              {"status", conic::to_string(r.status)},
              {"residuals", residuals_to_json(r.residuals)},
              {"iterations", r.iterations}};
    if (r.cross_check_value) j["cross_check_value"] = *r.cross_check_value;
    if (witnesses) {
        j["Y"] = to_json(r.Y);
        j["Z"] = to_json(r.Z);
        j["primal_Z"] = to_json(r.primal_Z);
        j["rho"] = to_json(r.rho);
        j["sigma"] = to_json(r.sigma);
    }
    return j;
}

Json to_json(const BoundsReport& r) {
    return {{"nuclear", r.nuclear},           {"square", r.square},
            {"spectral", r.spectral},         {"lower_slack", r.lower_slack},
            {"upper_slack", r.upper_slack},   {"spectral_slack", r.spectral_slack}};
}

Json to_json(const ExtremalityReport& r) { return {{"extremal", r.extremal}, {"residual", r.residual}}; }

ExperimentConfig experiment_config_from_json(const Json& j) {
    const char* ctx = "experiment config";
    reject_unknown(j,
                   {"experiment", "n", "N", "L", "kraus_rank", "dims", "rank", "ensemble", "group", "m", "trials",
                    "threshold", "eta", "regularizers", "cpt", "seed", "threads", "record_timing", "solver"},
                   ctx);
    ExperimentConfig c;
    c.kind = experiment_kind_from_string(get_as<std::string>(j, "experiment", ctx));
    if (j.contains("n") && j.contains("N")) throw IoError("experiment config: give only one of 'n' and 'N'");
    if (j.contains("n")) c.n = get_index(j, "n", ctx);
    if (j.contains("N")) c.n = get_index(j, "N", ctx);
    c.deconv_length = static_cast<Index>(get_or<long long>(j, "L", 0, ctx));
    c.kraus_rank = static_cast<Index>(get_or<long long>(j, "kraus_rank", c.kraus_rank, ctx));
    if (j.contains("dims")) std::tie(c.dimW, c.dimV) = dims_from_json(j, ctx);
    c.rank = static_cast<Index>(get_or<long long>(j, "rank", c.rank, ctx));
    if (j.contains("ensemble")) c.lowrank_ensemble = ensemble_kind_from_string(get_as<std::string>(j, "ensemble", ctx));
    if (j.contains("group")) c.group = unitary_group_from_string(get_as<std::string>(j, "group", ctx));
    c.m_values.clear();
    for (long long m : get_as<std::vector<long long>>(j, "m", ctx)) c.m_values.push_back(static_cast<Index>(m));
    c.trials = get_or<int>(j, "trials", c.trials, ctx);
    c.threshold = get_or<double>(j, "threshold", c.threshold, ctx);
    if (j.contains("eta")) {
        const Json& e = j["eta"];
        if (e.is_string() && e.get<std::string>() == "eps") {
            c.eta.reset();
        } else if (e.is_number()) {
            c.eta = e.get<double>();
        } else {
            throw IoError("experiment config: 'eta' must be a number or \"eps\"");
        }
    }
    if (j.contains("regularizers")) {
        c.regularizers.clear();
        for (const auto& r : get_as<std::vector<std::string>>(j, "regularizers", ctx))
            c.regularizers.push_back(regularizer_from_string(r));
    }
    c.cpt = get_or<bool>(j, "cpt", c.cpt, ctx);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed, ctx);
    c.threads = get_or<int>(j, "threads", c.threads, ctx);
    c.record_timing = get_or<bool>(j, "record_timing", c.record_timing, ctx);
    if (j.contains("solver")) c.solver = solver_options_from_json(j["solver"]);
    c.validate();
    return c;
}

Json to_json(const ExperimentConfig& c) {
    Json regs = Json::array();
    for (Regularizer r : c.regularizers) regs.push_back(to_string(r));
    Json j = {{"experiment", to_string(c.kind)},
              {"n", c.n},
              {"L", c.deconv_length},
              {"kraus_rank", c.kraus_rank},
              {"dims", {c.dimW, c.dimV}},
              {"rank", c.rank},
              {"ensemble", to_string(c.lowrank_ensemble)},
              {"group", to_string(c.group)},
              {"m", c.m_values},
              {"trials", c.trials},
              {"threshold", c.threshold},
              {"regularizers", std::move(regs)},
              {"cpt", c.cpt},
              {"seed", c.seed},
              {"threads", c.threads},
              {"record_timing", c.record_timing},
              {"solver", to_json(c.solver)}};
    j["eta"] = c.eta ? Json(*c.eta) : Json("eps");
    return j;
}

Json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for reading");
    try {
        return Json::parse(f);
    } catch (const Json::parse_error& e) {
        throw IoError("'" + path + "': " + e.what());
    }
}

void write_json_file(const Json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << j.dump(2) << '\n';
    f.flush();
    if (!f) throw IoError("write to '" + path + "' failed");
}

}  // namespace diamondrec::io
