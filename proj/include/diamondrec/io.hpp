#pragma once

#include <string>

#include <json.hpp>

#include "diamondrec/choi.hpp"
#include "diamondrec/conic.hpp"
#include "diamondrec/harness.hpp"
#include "diamondrec/linalg.hpp"
#include "diamondrec/measure.hpp"
#include "diamondrec/norms.hpp"
#include "diamondrec/recovery.hpp"

// JSON encodings. Malformed documents raise IoError; well-formed documents
// with invalid values (unknown kinds, bad dimensions) raise PreconditionError
// or ShapeError.
namespace diamondrec::io {

using Json = nlohmann::json;

/// {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order. On
/// input a bare number is accepted in place of [re, 0].
Json to_json(const ComplexMatrix& X);
ComplexMatrix matrix_from_json(const Json& j);

/// Matrix format plus "dimW" and "dimV".
Json to_json(const BipartiteOperator& X);
BipartiteOperator bipartite_from_json(const Json& j);

/// {"choi": bipartite}.
Json to_json(const OperatorMap& M);
OperatorMap operator_map_from_json(const Json& j);

/// {"kraus": [matrix, ...]}.
Json to_json(const KrausSet& k);
KrausSet kraus_from_json(const Json& j);

/// [[re, im], ...]; bare numbers accepted on input.
Json vector_to_json(const ComplexVector& v);
ComplexVector vector_from_json(const Json& j);

/// {"kind", "m", "dims": [dimW, dimV], "seed", "group", "L"}. Only "kind"
/// and "m" are required.
Json to_json(const EnsembleSpec& s);
EnsembleSpec ensemble_spec_from_json(const Json& j);

/// {"spec": ..., "dims": [dimW, dimV], "functionals": [matrix, ...]}.
Json export_ensemble(const MeasurementEnsemble& e);

/// Either an ensemble spec (materialised from its seed) or an explicit
/// {"dims": [dimW, dimV], "functionals": [...]} list.
MeasurementEnsemble ensemble_from_json(const Json& j);

/// {"tol", "max_iters", "anderson_memory"}; absent keys keep their defaults.
Json to_json(const conic::SolverOptions& o);
conic::SolverOptions solver_options_from_json(const Json& j);

/// {"ensemble", "y", "eta", "regularizer", "cpt", "field", "truth", "solver"}.
/// "eta" may be a number or "eps"; "y" may be omitted when "truth" is given,
/// in which case the noiseless data of the truth is used.
RecoveryProblem recovery_problem_from_json(const Json& j);
Json to_json(const RecoveryResult& r);

Json to_json(const SquareNormReport& r, bool witnesses = true);
Json to_json(const BoundsReport& r);
Json to_json(const ExtremalityReport& r);

/// Mirrors ExperimentConfig; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const Json& j);
Json to_json(const ExperimentConfig& c);

Json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const Json& j, const std::string& path);

}  // namespace diamondrec::io
