#include "diamondrec/programs.hpp"

#include "diamondrec/errors.hpp"

namespace diamondrec {

using namespace conic;

std::string to_string(Regularizer r) { return r == Regularizer::Nuclear ? "nuclear" : "square"; }

Regularizer regularizer_from_string(const std::string& s) {
    if (s == "nuclear") return Regularizer::Nuclear;
    if (s == "square") return Regularizer::Square;
    throw PreconditionError("unknown regularizer '" + s + "' (expected nuclear or square)");
}

namespace {

// t 1 - Tr_W(M) as an affine matrix.
AffineMatrix shifted_partial_trace(Index t, const AffineMatrix& M, Index dimW, Index dimV) {
    AffineMatrix out = -M.partial_trace_first(dimW, dimV);
    for (Index i = 0; i < dimV; ++i) out(i, i).re += Affine::var(t);
    return out;
}

}  // namespace

RegularizerBlock add_regularizer(ProgramBuilder& pb, const AffineMatrix& X, Regularizer reg, Index dimW, Index dimV,
                                 Field field) {
    const Index d = dimW * dimV;
    if (X.rows() != d || X.cols() != d) throw ShapeError("add_regularizer: X does not live on W (x) V");
    RegularizerBlock out;
    out.Y = pb.add_hermitian(d, field);
    out.Z = pb.add_hermitian(d, field);
    const AffineMatrix mX = -X;
    out.block = pb.add_psd(AffineMatrix::blocks(out.Y, mX, mX.adjoint(), out.Z), field);
    if (reg == Regularizer::Nuclear) {
        out.objective = 0.5 * (out.Y.trace().re + out.Z.trace().re);
        return out;
    }
    const Index t1 = pb.add_scalar();
    const Index t2 = pb.add_scalar();
    out.t_left = pb.add_psd(shifted_partial_trace(t1, out.Y, dimW, dimV), field);
    out.t_right = pb.add_psd(shifted_partial_trace(t2, out.Z, dimW, dimV), field);
    out.objective = (0.5 * static_cast<double>(dimV)) * (Affine::var(t1) + Affine::var(t2));
    return out;
}

}  // namespace diamondrec
