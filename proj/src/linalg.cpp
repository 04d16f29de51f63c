#include "diamondrec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "diamondrec/errors.hpp"

namespace diamondrec {

namespace {

constexpr double kAbsFloor = 1e-12;

void require_square(const ComplexMatrix& X, const char* op) {
    if (X.rows() != X.cols()) {
        std::ostringstream os;
        os << op << ": expected a square matrix, got " << X.rows() << "x" << X.cols();
        throw ShapeError(os.str());
    }
}

void require_finite(const ComplexMatrix& X, const char* op) {
    if (!all_finite(X)) throw NumericError(std::string(op) + ": non-finite input entries");
}

}  // namespace

BipartiteOperator::BipartiteOperator(ComplexMatrix mat, Index dimW, Index dimV)
    : mat_(std::move(mat)), dimW_(dimW), dimV_(dimV) {
    if (dimW < 1 || dimV < 1) throw ShapeError("BipartiteOperator: factor dimensions must be >= 1");
    if (mat_.rows() != dimW * dimV || mat_.cols() != dimW * dimV) {
        std::ostringstream os;
        os << "BipartiteOperator: matrix is " << mat_.rows() << "x" << mat_.cols()
           << " but dimW*dimV = " << dimW * dimV;
        throw ShapeError(os.str());
    }
}

BipartiteOperator BipartiteOperator::operator+(const BipartiteOperator& o) const {
    if (o.dimW_ != dimW_ || o.dimV_ != dimV_) throw ShapeError("BipartiteOperator: dimension mismatch in +");
    return {mat_ + o.mat_, dimW_, dimV_};
}

BipartiteOperator BipartiteOperator::operator-(const BipartiteOperator& o) const {
    if (o.dimW_ != dimW_ || o.dimV_ != dimV_) throw ShapeError("BipartiteOperator: dimension mismatch in -");
    return {mat_ - o.mat_, dimW_, dimV_};
}

bool all_finite(const ComplexMatrix& X) {
    return X.real().allFinite() && X.imag().allFinite();
}

Svd svd(const ComplexMatrix& X) {
    require_finite(X, "svd");
    Eigen::JacobiSVD<ComplexMatrix> solver(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Svd out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    if (!all_finite(out.U) || !all_finite(out.V) || !out.sigma.allFinite()) {
        // Jacobi sweeps are bounded by the matrix size; report that bound.
        throw NumericError("svd: Jacobi iteration produced non-finite factors", 2 * X.rows() * X.cols());
    }
    return out;
}

ComplexMatrix hermitian_part(const ComplexMatrix& X) {
    require_square(X, "hermitian_part");
    return 0.5 * (X + X.adjoint());
}

bool is_hermitian(const ComplexMatrix& X, double tol) {
    if (X.rows() != X.cols()) return false;
    return (X - X.adjoint()).norm() <= tol * std::max(1.0, X.norm());
}

HermitianEigen hermitian_eig(const ComplexMatrix& X) {
    require_square(X, "hermitian_eig");
    require_finite(X, "hermitian_eig");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(X));
    if (es.info() != Eigen::Success) throw NumericError("hermitian_eig: eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

ComplexMatrix sqrt_psd(const ComplexMatrix& X, double tol) {
    require_square(X, "sqrt_psd");
    if (!is_hermitian(X, std::max(tol, 1e-10))) throw PreconditionError("sqrt_psd: input is not Hermitian");
    if (X.size() == 0) return X;
    const auto eig = hermitian_eig(X);
    const double scale = eig.values.cwiseAbs().maxCoeff();
    const double threshold = std::max(tol * scale, kAbsFloor);
    RealVector roots(eig.values.size());
    for (Index i = 0; i < eig.values.size(); ++i) {
        const double lambda = eig.values(i);
        if (lambda < -threshold) {
            std::ostringstream os;
            os << "sqrt_psd: eigenvalue " << lambda << " below -" << threshold;
            throw NotPsdError(os.str(), lambda);
        }
        roots(i) = std::sqrt(std::max(lambda, 0.0));
    }
    return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

AbsoluteValues absolute_values(const ComplexMatrix& X) {
    const auto d = svd(X);
    const Index k = d.sigma.size();
    const ComplexMatrix Uk = d.U.leftCols(k);
    const ComplexMatrix Vk = d.V.leftCols(k);
    return {Uk * d.sigma.asDiagonal() * Uk.adjoint(), Vk * d.sigma.asDiagonal() * Vk.adjoint()};
}

ComplexMatrix sign_matrix(const ComplexMatrix& X) {
    require_square(X, "sign_matrix");
    const auto d = svd(X);
    return d.V * d.U.adjoint();
}

ComplexMatrix partial_trace_first(const ComplexMatrix& X, Index dimW, Index dimV) {
    if (dimW < 1 || dimV < 1 || X.rows() != dimW * dimV || X.cols() != dimW * dimV) {
        std::ostringstream os;
        os << "partial_trace_first: " << X.rows() << "x" << X.cols() << " matrix does not split as "
           << dimW << "x" << dimV;
        throw ShapeError(os.str());
    }
    ComplexMatrix out = ComplexMatrix::Zero(dimV, dimV);
    for (Index w = 0; w < dimW; ++w) out += X.block(w * dimV, w * dimV, dimV, dimV);
    return out;
}

ComplexMatrix partial_trace_first(const BipartiteOperator& X) {
    return partial_trace_first(X.mat(), X.dimW(), X.dimV());
}

ComplexMatrix lift_identity_first(const ComplexMatrix& Y, Index dimW) {
    require_square(Y, "lift_identity_first");
    const Index n = Y.rows();
    ComplexMatrix out = ComplexMatrix::Zero(dimW * n, dimW * n);
    for (Index w = 0; w < dimW; ++w) out.block(w * n, w * n, n, n) = Y;
    return out;
}

double schatten_norm(const ComplexMatrix& X, Schatten p) {
    require_finite(X, "schatten_norm");
    if (X.size() == 0) return 0.0;
    switch (p) {
        case Schatten::Two:
            return X.norm();
        case Schatten::One:
        case Schatten::Inf: {
            Eigen::JacobiSVD<ComplexMatrix> s(X);
            const RealVector& sv = s.singularValues();
            return p == Schatten::One ? sv.sum() : sv(0);
        }
    }
    return 0.0;
}

ComplexVector vec(const ComplexMatrix& X) {
    ComplexVector v(X.size());
    for (Index i = 0; i < X.rows(); ++i)
        for (Index j = 0; j < X.cols(); ++j) v(i * X.cols() + j) = X(i, j);
    return v;
}

ComplexMatrix devec(const ComplexVector& v, Index rows, Index cols) {
    if (rows < 0 || cols < 0 || rows * cols != v.size()) {
        std::ostringstream os;
        os << "devec: length " << v.size() << " does not factor as " << rows << "x" << cols;
        throw ShapeError(os.str());
    }
    ComplexMatrix X(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) X(i, j) = v(i * cols + j);
    return X;
}

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B) {
    ComplexMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Complex inner(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) throw ShapeError("inner: shape mismatch");
    return (A.conjugate().cwiseProduct(B)).sum();
}

}  // namespace diamondrec
