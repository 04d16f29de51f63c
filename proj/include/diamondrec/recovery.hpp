#pragma once

#include <optional>

#include "diamondrec/conic.hpp"
#include "diamondrec/measure.hpp"
#include "diamondrec/programs.hpp"

namespace diamondrec {

struct RecoveryProblem {
    MeasurementEnsemble ensemble;
    ComplexVector y;
    double eta = 0.0;
    Regularizer regularizer = Regularizer::Square;
    bool cpt = false;
    /// Field of the unknown. Real restricts the estimate to real matrices;
    /// complex functionals then constrain both parts of the data.
    Field field = Field::Complex;
    /// Used only for reporting the Frobenius error.
    std::optional<ComplexMatrix> truth;
    conic::SolverOptions solver;
};

struct RecoveryResult {
    BipartiteOperator estimate;
    double objective = 0.0;
    double eta_used = 0.0;
    double misfit = 0.0;  // ||A(estimate) - y||_2
    std::optional<double> frobenius_error;
    conic::SolveStatus status = conic::SolveStatus::MaxIters;
    conic::Residuals residuals;
    long iterations = 0;
    double solve_ms = 0.0;
};

/// Noise bound actually imposed: max(eta, 1e-9 ||y||).
double effective_eta(double eta, const ComplexVector& y);

/// J = J^dagger, J >= 0 and Tr_W J = 1_V for the affine matrix J.
void add_cpt_constraints(conic::ProgramBuilder& pb, const conic::AffineMatrix& J, Index dimW, Index dimV, Field field);

/// The conic program solved by recover(), for inspection or export.
conic::ConicProgram build_recovery_program(const RecoveryProblem& p);

/// min regularizer(X) s.t. ||A(X) - y||_2 <= eta (and CPT constraints if requested).
RecoveryResult recover(const RecoveryProblem& p);
/// recover() with a check that p.regularizer matches.
RecoveryResult recover_nuclear(const RecoveryProblem& p);
RecoveryResult recover_square(const RecoveryProblem& p);

}  // namespace diamondrec
