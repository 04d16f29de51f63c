#include <cmath>

#include <Eigen/Eigenvalues>

#include "diamondrec/conic.hpp"
#include "diamondrec/errors.hpp"

namespace diamondrec::conic {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

RealVector svec(const RealMatrix& S) {
    const Index n = S.rows();
    RealVector v(n * (n + 1) / 2);
    Index k = 0;
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i) v(k++) = i == j ? S(i, j) : kSqrt2 * 0.5 * (S(i, j) + S(j, i));
    return v;
}

RealMatrix smat(const Eigen::Ref<const RealVector>& v, Index n) {
    if (v.size() != n * (n + 1) / 2) throw ShapeError("smat: length does not match matrix order");
    RealMatrix S(n, n);
    Index k = 0;
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i) {
            const double value = i == j ? v(k) : v(k) / kSqrt2;
            S(i, j) = value;
            S(j, i) = value;
            ++k;
        }
    return S;
}

void project_cone(const ConeSegment& cone, Eigen::Ref<RealVector> v, bool dual) {
    switch (cone.kind) {
        case ConeKind::Zero:
            if (!dual) v.setZero();
            return;
        case ConeKind::NonNeg:
            v = v.cwiseMax(0.0);
            return;
        case ConeKind::Soc: {
            if (v.size() == 0) return;
            const double t = v(0);
            const double r = v.tail(v.size() - 1).norm();
            if (r <= t) return;
            if (r <= -t) {
                v.setZero();
                return;
            }
            const double a = 0.5 * (t + r);
            v(0) = a;
            v.tail(v.size() - 1) *= a / r;
            return;
        }
        case ConeKind::Psd: {
            const Index n = cone.dim;
            if (n == 0) return;
            if (n == 1) {
                v(0) = std::max(v(0), 0.0);
                return;
            }
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(smat(v, n));
            if (es.info() != Eigen::Success) throw NumericError("project_cone: eigensolver failed");
            const RealVector lambda = es.eigenvalues().cwiseMax(0.0);
            const RealMatrix& Q = es.eigenvectors();
            v = svec(Q * lambda.asDiagonal() * Q.transpose());
            return;
        }
    }
}

RealMatrix embed_complex(const ComplexMatrix& H, double tol) {
    if (!is_hermitian(H, tol)) throw PreconditionError("embed_complex: input is not Hermitian");
    const Index n = H.rows();
    const ComplexMatrix Hh = hermitian_part(H);
    RealMatrix E(2 * n, 2 * n);
    E.topLeftCorner(n, n) = Hh.real();
    E.bottomRightCorner(n, n) = Hh.real();
    E.topRightCorner(n, n) = -Hh.imag();
    E.bottomLeftCorner(n, n) = Hh.imag();
    return E;
}

ComplexMatrix embed_adjoint(const RealMatrix& W) {
    const Index n = W.rows() / 2;
    if (W.rows() != 2 * n || W.cols() != 2 * n) throw ShapeError("embed_adjoint: expected an even-order square matrix");
    ComplexMatrix out(n, n);
    out.real() = W.topLeftCorner(n, n) + W.bottomRightCorner(n, n);
    out.imag() = W.bottomLeftCorner(n, n) - W.topRightCorner(n, n);
    return hermitian_part(out);
}

void ConicProgram::validate() const {
    Index rows = 0;
    for (const auto& cone : cones) {
        if (cone.dim < 0) throw ShapeError("ConicProgram: negative cone dimension");
        if (cone.kind == ConeKind::Soc && cone.dim < 1) throw ShapeError("ConicProgram: empty second-order cone");
        rows += cone.rows();
    }
    if (rows != b.size()) throw ShapeError("ConicProgram: cone segments do not cover the constraint rows");
    if (A.rows() != b.size() || A.cols() != c.size()) throw ShapeError("ConicProgram: A does not match b and c");
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::MaxIters: return "max_iters";
        case SolveStatus::InfeasibleSuspected: return "infeasible_suspected";
    }
    return "unknown";
}

double Residuals::max() const noexcept { return std::max({primal, dual, gap}); }

}  // namespace diamondrec::conic
