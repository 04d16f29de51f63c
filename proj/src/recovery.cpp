#include "diamondrec/recovery.hpp"

#include <chrono>

#include "diamondrec/errors.hpp"

namespace diamondrec {

using namespace conic;

namespace {

void validate(const RecoveryProblem& p) {
    if (p.y.size() != p.ensemble.m()) throw ShapeError("recover: y length differs from the ensemble size");
    if (!(p.eta >= 0.0)) throw PreconditionError("recover: eta must be >= 0");
    if (p.ensemble.m() < 1) throw PreconditionError("recover: empty ensemble");
    if (p.truth) {
        const Index d = p.ensemble.dimW() * p.ensemble.dimV();
        if (p.truth->rows() != d || p.truth->cols() != d) throw ShapeError("recover: truth has the wrong shape");
    }
}

struct Assembled {
    ProgramBuilder pb;
    AffineMatrix X;
};

Assembled assemble(const RecoveryProblem& p) {
    validate(p);
    const Index dW = p.ensemble.dimW(), dV = p.ensemble.dimV(), d = dW * dV;
    Assembled a;
    a.X = a.pb.add_matrix(d, d, p.field);
    const RegularizerBlock reg = add_regularizer(a.pb, a.X, p.regularizer, dW, dV, p.field);
    a.pb.minimize(reg.objective);

    const bool imag_rows =
        p.field == Field::Complex || !p.ensemble.is_real() || p.y.imag().cwiseAbs().maxCoeff() != 0.0;
    std::vector<Affine> re, im;
    for (Index i = 0; i < p.ensemble.m(); ++i) {
        const ComplexAffine v = a.X.trace_with(p.ensemble.functionals[static_cast<std::size_t>(i)]);
        re.push_back(v.re - p.y(i).real());
        if (imag_rows) im.push_back(v.im - p.y(i).imag());
    }
    re.insert(re.end(), im.begin(), im.end());
    a.pb.add_soc(Affine(effective_eta(p.eta, p.y)), re);
    if (p.cpt) add_cpt_constraints(a.pb, a.X, dW, dV, p.field);
    return a;
}

}  // namespace

double effective_eta(double eta, const ComplexVector& y) { return std::max(eta, 1e-9 * y.norm()); }

void add_cpt_constraints(ProgramBuilder& pb, const AffineMatrix& J, Index dimW, Index dimV, Field field) {
    if (dimW < 1 || dimV < 1) throw PreconditionError("add_cpt_constraints: dimensions are required");
    const Index d = dimW * dimV;
    if (J.rows() != d || J.cols() != d) throw ShapeError("add_cpt_constraints: J does not live on W (x) V");
    std::vector<Affine> eq;
    for (Index i = 0; i < d; ++i) {
        if (field == Field::Complex) eq.push_back(J(i, i).im);
        for (Index j = i + 1; j < d; ++j) {
            eq.push_back(J(i, j).re - J(j, i).re);
            if (field == Field::Complex) eq.push_back(J(i, j).im + J(j, i).im);
        }
    }
    const AffineMatrix T = J.partial_trace_first(dimW, dimV);
    for (Index i = 0; i < dimV; ++i) {
        eq.push_back(T(i, i).re - 1.0);
        for (Index j = i + 1; j < dimV; ++j) {
            eq.push_back(T(i, j).re);
            if (field == Field::Complex) eq.push_back(T(i, j).im);
        }
    }
    pb.add_equality(eq);
    pb.add_psd(J, field);
}

ConicProgram build_recovery_program(const RecoveryProblem& p) { return assemble(p).pb.build(); }

RecoveryResult recover(const RecoveryProblem& p) {
    const Assembled a = assemble(p);
    const ConicProgram prog = a.pb.build();
    const auto t0 = std::chrono::steady_clock::now();
    const SolverResult r = solve(prog, p.solver);
    const auto t1 = std::chrono::steady_clock::now();

    RecoveryResult out;
    out.estimate = BipartiteOperator(a.X.evaluate(r.x), p.ensemble.dimW(), p.ensemble.dimV());
    out.objective = r.primal_value;
    out.eta_used = effective_eta(p.eta, p.y);
    out.misfit = (apply_measurement(p.ensemble, out.estimate) - p.y).norm();
    if (p.truth) out.frobenius_error = (out.estimate.mat() - *p.truth).norm();
    out.status = r.status;
    out.residuals = r.residuals;
    out.iterations = r.iterations;
    out.solve_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return out;
}

RecoveryResult recover_nuclear(const RecoveryProblem& p) {
    if (p.regularizer != Regularizer::Nuclear) throw PreconditionError("recover_nuclear: regularizer is not nuclear");
    return recover(p);
}

RecoveryResult recover_square(const RecoveryProblem& p) {
    if (p.regularizer != Regularizer::Square) throw PreconditionError("recover_square: regularizer is not square");
    return recover(p);
}

}  // namespace diamondrec
