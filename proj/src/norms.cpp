#include "diamondrec/norms.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>

#include "diamondrec/errors.hpp"
#include "diamondrec/programs.hpp"

namespace diamondrec {

using namespace conic;

namespace {

Field field_of(const ComplexMatrix& X) {
    return X.imag().cwiseAbs().maxCoeff() == 0.0 ? Field::Real : Field::Complex;
}

double min_eigenvalue(const ComplexMatrix& H) { return hermitian_eig(H).values.minCoeff(); }
double max_eigenvalue(const ComplexMatrix& H) { return hermitian_eig(H).values.maxCoeff(); }

// 1_W (x) M for an affine dimV x dimV matrix.
AffineMatrix lift_affine(const AffineMatrix& M, Index dimW) {
    const Index dV = M.rows();
    AffineMatrix out(dimW * dV, dimW * dV);
    for (Index w = 0; w < dimW; ++w)
        for (Index i = 0; i < dV; ++i)
            for (Index j = 0; j < dV; ++j) out(w * dV + i, w * dV + j) = M(i, j);
    return out;
}

void require_optimal(const SolverResult& r, const char* what) {
    if (r.status != SolveStatus::Optimal) {
        char res[32];
        std::snprintf(res, sizeof res, "%.3e", r.residuals.max());
        throw NumericError(std::string(what) + ": solver stopped with status " + to_string(r.status) +
                               " (residual " + res + ")",
                           r.iterations);
    }
}

}  // namespace

SquareNormReport square_norm(const BipartiteOperator& X, const SquareNormOptions& opts) {
    const Index dW = X.dimW(), dV = X.dimV(), d = X.dim();
    const Field field = field_of(X.mat());
    ProgramBuilder pb;
    const RegularizerBlock reg = add_regularizer(pb, AffineMatrix::constant(X.mat()), Regularizer::Square, dW, dV, field);
    pb.minimize(reg.objective);
    const SolverResult r = solve(pb.build(), opts.solver);
    require_optimal(r, "square_norm");

    SquareNormReport rep;
    rep.status = r.status;
    rep.residuals = r.residuals;
    rep.iterations = r.iterations;
    rep.value = r.primal_value;
    rep.dual_value = r.primal_value;
    rep.Y = reg.Y.evaluate(r.x);
    rep.Z = reg.Z.evaluate(r.x);

    const ComplexMatrix omega = pb.psd_multiplier(reg.block, r.y);
    rep.primal_Z = 2.0 * omega.bottomLeftCorner(d, d);
    rep.sigma = 2.0 * pb.psd_multiplier(reg.t_left, r.y);
    rep.rho = 2.0 * pb.psd_multiplier(reg.t_right, r.y);
    rep.primal_value = (X.mat() * rep.primal_Z).trace().real();
    rep.gap = std::abs(rep.primal_value - rep.dual_value);

    if (opts.cross_check) rep.cross_check_value = square_norm_primal(X, opts.solver);
    return rep;
}

double square_norm_primal(const BipartiteOperator& X, const SolverOptions& opts) {
    const Index dW = X.dimW(), dV = X.dimV(), d = X.dim();
    const Field field = field_of(X.mat());
    ProgramBuilder pb;
    const AffineMatrix rho = pb.add_hermitian(dV, field);
    const AffineMatrix sigma = pb.add_hermitian(dV, field);
    const AffineMatrix Zp = pb.add_matrix(d, d, field);
    pb.add_psd(AffineMatrix::blocks(lift_affine(rho, dW), Zp, Zp.adjoint(), lift_affine(sigma, dW)), field);
    pb.add_equality({rho.trace().re - static_cast<double>(dV), sigma.trace().re - static_cast<double>(dV)});
    pb.minimize(-Zp.trace_with(X.mat()).re);
    const SolverResult r = solve(pb.build(), opts);
    require_optimal(r, "square_norm_primal");
    return -r.primal_value;
}

double diamond_norm(const OperatorMap& M, const SquareNormOptions& opts) {
    return square_norm(M.choi(), opts).value / static_cast<double>(M.dimV());
}

BoundsReport check_bounds(const BipartiteOperator& X, const SquareNormOptions& opts) {
    BoundsReport b;
    b.nuclear = nuclear_norm(X.mat());
    b.spectral = spectral_norm(X.mat());
    b.square = square_norm(X, opts).value;
    b.lower_slack = b.square - b.nuclear;
    b.upper_slack = static_cast<double>(X.dimV()) * b.nuclear - b.square;
    b.spectral_slack = static_cast<double>(X.dim()) * b.spectral - b.square;
    return b;
}

ExtremalityReport extremality_check(const BipartiteOperator& X, double tol) {
    const double nuc = nuclear_norm(X.mat());
    if (nuc == 0.0) return {true, 0.0};
    const AbsoluteValues abs = absolute_values(X.mat());
    const double c = nuc / static_cast<double>(X.dimV());
    const ComplexMatrix flat = c * ComplexMatrix::Identity(X.dimV(), X.dimV());
    const double left = (partial_trace_first(abs.left, X.dimW(), X.dimV()) - flat).norm();
    const double right = (partial_trace_first(abs.right, X.dimW(), X.dimV()) - flat).norm();
    const double residual = std::max(left, right) / c;
    return {residual <= tol, residual};
}

StandardSdp watrous_sdp(const BipartiteOperator& X) {
    const Index dW = X.dimW(), n = X.dimV(), d = X.dim();
    const Index b2 = 2 * n, b3 = 2 * n + d, order = 2 * n + 2 * d;
    ComplexMatrix C = ComplexMatrix::Zero(order, order);
    C.block(b2, b3, d, d) = 0.5 * static_cast<double>(n) * X.mat();
    C.block(b3, b2, d, d) = 0.5 * static_cast<double>(n) * X.mat().adjoint();
    ComplexMatrix D = ComplexMatrix::Zero(2 + 2 * d, 2 + 2 * d);
    D(0, 0) = 1.0;
    D(1, 1) = 1.0;
    const LinearMap xi = [=](const ComplexMatrix& Z) -> ComplexMatrix {
        ComplexMatrix out = ComplexMatrix::Zero(2 + 2 * d, 2 + 2 * d);
        const ComplexMatrix W0 = Z.block(0, 0, n, n);
        const ComplexMatrix W1 = Z.block(n, n, n, n);
        out(0, 0) = W0.trace();
        out(1, 1) = W1.trace();
        out.block(2, 2, d, d) = Z.block(b2, b2, d, d) - lift_identity_first(W0, dW);
        out.block(2 + d, 2 + d, d, d) = Z.block(b3, b3, d, d) - lift_identity_first(W1, dW);
        return out;
    };
    return build_standard_sdp(C, D, xi);
}

double OptimalPointsReport::max_residual() const {
    return std::max({kkt.max_residual(), std::abs(kkt.primal_value - nuclear), std::abs(kkt.dual_value - nuclear),
                     std::abs(reduced_primal_value - nuclear), std::abs(reduced_dual_value - nuclear),
                     reduced_primal_infeasibility, reduced_dual_infeasibility});
}

OptimalPointsReport verify_optimal_points(const BipartiteOperator& X, double tol) {
    const ExtremalityReport ext = extremality_check(X, tol);
    if (!ext.extremal)
        throw PreconditionError("verify_optimal_points: X is not extremal (residual " + std::to_string(ext.residual) +
                                ")");
    const Index dW = X.dimW(), n = X.dimV(), d = X.dim();
    const double nd = static_cast<double>(n);
    const StandardSdp sdp = watrous_sdp(X);
    const ComplexMatrix S = sign_matrix(X.mat());
    const AbsoluteValues abs = absolute_values(X.mat());

    OptimalPointsReport rep;
    rep.nuclear = nuclear_norm(X.mat());

    const Index b2 = 2 * n, b3 = 2 * n + d;
    rep.Z_sharp = ComplexMatrix::Identity(sdp.n_in(), sdp.n_in()) / nd;
    rep.Z_sharp.block(b3, b2, d, d) = S / nd;
    rep.Z_sharp.block(b2, b3, d, d) = S.adjoint() / nd;

    rep.Y_sharp = ComplexMatrix::Zero(sdp.n_out(), sdp.n_out());
    rep.Y_sharp(0, 0) = 0.5 * rep.nuclear;
    rep.Y_sharp(1, 1) = 0.5 * rep.nuclear;
    rep.Y_sharp.block(2, 2, d, d) = 0.5 * nd * abs.left;
    rep.Y_sharp.block(2 + d, 2 + d, d, d) = 0.5 * nd * abs.right;
    rep.kkt = verify_kkt(sdp, rep.Z_sharp, rep.Y_sharp);

    const ComplexMatrix I = ComplexMatrix::Identity(d, d);
    ComplexMatrix pblock(2 * d, 2 * d);
    pblock << I, S, S.adjoint(), I;
    rep.reduced_primal_value = (X.mat() * S).trace().real();
    rep.reduced_primal_infeasibility = std::max(0.0, -min_eigenvalue(pblock));
    ComplexMatrix dblock(2 * d, 2 * d);
    dblock << abs.left, -X.mat(), -X.mat().adjoint(), abs.right;
    rep.reduced_dual_value = 0.5 * nd *
                             (max_eigenvalue(partial_trace_first(abs.left, dW, n)) +
                              max_eigenvalue(partial_trace_first(abs.right, dW, n)));
    rep.reduced_dual_infeasibility = std::max(0.0, -min_eigenvalue(dblock));
    return rep;
}

double sandwiched_nuclear_norm(const BipartiteOperator& X, const ComplexMatrix& A, const ComplexMatrix& B) {
    const Index dV = X.dimV();
    if (A.rows() != dV || A.cols() != dV || B.rows() != dV || B.cols() != dV)
        throw ShapeError("sandwiched_nuclear_norm: A and B must be dimV x dimV");
    const ComplexMatrix IW = ComplexMatrix::Identity(X.dimW(), X.dimW());
    return nuclear_norm(kron(IW, A) * X.mat() * kron(IW, B));
}

double variational_lower_bound(const BipartiteOperator& X, int samples, Rng& rng) {
    if (samples < 1) throw PreconditionError("variational_lower_bound: samples must be >= 1");
    const Index dV = X.dimV();
    const double scale = std::sqrt(static_cast<double>(dV));
    double best = nuclear_norm(X.mat());
    for (int s = 1; s < samples; ++s) {
        ComplexMatrix A = gaussian_matrix(dV, dV, Field::Complex, rng);
        ComplexMatrix B = gaussian_matrix(dV, dV, Field::Complex, rng);
        A *= scale / A.norm();
        B *= scale / B.norm();
        best = std::max(best, sandwiched_nuclear_norm(X, A, B));
    }
    return best;
}

}  // namespace diamondrec
