#pragma once

#include <complex>

#include <Eigen/Core>

namespace diamondrec {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Square operator on W (x) V with W as the first tensor factor.
///
/// Row/column index of the basis vector e_w (x) e_v is w * dimV + v.
class BipartiteOperator {
public:
    BipartiteOperator() = default;
    BipartiteOperator(ComplexMatrix mat, Index dimW, Index dimV);

    const ComplexMatrix& mat() const noexcept { return mat_; }
    Index dimW() const noexcept { return dimW_; }
    Index dimV() const noexcept { return dimV_; }
    Index dim() const noexcept { return dimW_ * dimV_; }

    BipartiteOperator operator*(double s) const { return {mat_ * s, dimW_, dimV_}; }
    BipartiteOperator operator+(const BipartiteOperator& o) const;
    BipartiteOperator operator-(const BipartiteOperator& o) const;
    BipartiteOperator adjoint() const { return {mat_.adjoint(), dimW_, dimV_}; }

private:
    ComplexMatrix mat_;
    Index dimW_ = 0;
    Index dimV_ = 0;
};

struct Svd {
    ComplexMatrix U;    // rows x rows, unitary
    RealVector sigma;   // min(rows, cols), descending
    ComplexMatrix V;    // cols x cols, unitary
};

/// Full singular value decomposition X = U diag(sigma) V^dagger.
Svd svd(const ComplexMatrix& X);

/// Eigendecomposition of the Hermitian part (X + X^dagger)/2, ascending.
struct HermitianEigen {
    RealVector values;
    ComplexMatrix vectors;
};
HermitianEigen hermitian_eig(const ComplexMatrix& X);

/// True if ||X - X^dagger||_F <= tol * max(1, ||X||_F).
bool is_hermitian(const ComplexMatrix& X, double tol = 1e-10);

ComplexMatrix hermitian_part(const ComplexMatrix& X);

/// Unique PSD square root. Eigenvalues in [-tol * ||X||, 0) are clipped to
/// zero; anything more negative raises NotPsdError.
ComplexMatrix sqrt_psd(const ComplexMatrix& X, double tol = 1e-9);

/// Left and right absolute values sqrt(X X^dagger), sqrt(X^dagger X), both
/// obtained from one SVD.
struct AbsoluteValues {
    ComplexMatrix left;
    ComplexMatrix right;
};
AbsoluteValues absolute_values(const ComplexMatrix& X);

/// Unitary S_X = V U^dagger for X = U Sigma V^dagger. Not unique when X is
/// rank deficient; the SVD's own completion of the null space is used.
ComplexMatrix sign_matrix(const ComplexMatrix& X);

/// Tr_W: contracts the first tensor factor, returning a dimV x dimV matrix.
ComplexMatrix partial_trace_first(const BipartiteOperator& X);
ComplexMatrix partial_trace_first(const ComplexMatrix& X, Index dimW, Index dimV);

/// 1_W (x) Y.
ComplexMatrix lift_identity_first(const ComplexMatrix& Y, Index dimW);

enum class Schatten { One, Two, Inf };

double schatten_norm(const ComplexMatrix& X, Schatten p);
inline double nuclear_norm(const ComplexMatrix& X) { return schatten_norm(X, Schatten::One); }
inline double spectral_norm(const ComplexMatrix& X) { return schatten_norm(X, Schatten::Inf); }

/// Row-major vectorization: vec(E_ij) = e_i (x) e_j.
ComplexVector vec(const ComplexMatrix& X);
ComplexMatrix devec(const ComplexVector& v, Index rows, Index cols);

ComplexMatrix kron(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

/// Frobenius inner product <A, B> = Tr(A^dagger B).
Complex inner(const ComplexMatrix& A, const ComplexMatrix& B);

bool all_finite(const ComplexMatrix& X);

}  // namespace diamondrec
