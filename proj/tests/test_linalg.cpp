#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "diamondrec/errors.hpp"
#include "diamondrec/linalg.hpp"
#include "diamondrec/random.hpp"

using namespace diamondrec;

namespace {

// Singular values from the eigenvalues of X^dagger X, independent of svd().
RealVector singular_values_oracle(const ComplexMatrix& X) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(X.adjoint() * X);
    return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

}  // namespace

TEST_CASE("svd reconstructs and is unitary") {
    Rng rng(1);
    for (int t = 0; t < 5; ++t) {
        const ComplexMatrix X = gaussian_matrix(3 + t % 2, 4 - t % 2, Field::Complex, rng);
        const Svd s = svd(X);
        ComplexMatrix S = ComplexMatrix::Zero(X.rows(), X.cols());
        for (Index i = 0; i < s.sigma.size(); ++i) S(i, i) = s.sigma(i);
        CHECK((s.U * S * s.V.adjoint() - X).norm() < 1e-12);
        CHECK((s.U.adjoint() * s.U - ComplexMatrix::Identity(X.rows(), X.rows())).norm() < 1e-12);
        CHECK((s.V.adjoint() * s.V - ComplexMatrix::Identity(X.cols(), X.cols())).norm() < 1e-12);
        for (Index i = 1; i < s.sigma.size(); ++i) CHECK(s.sigma(i - 1) >= s.sigma(i));
    }
}

TEST_CASE("schatten norms against eigenvalue oracle") {
    Rng rng(2);
    const ComplexMatrix X = gaussian_matrix(4, 4, Field::Complex, rng);
    const RealVector sv = singular_values_oracle(X);
    CHECK(nuclear_norm(X) == doctest::Approx(sv.sum()).epsilon(1e-12));
    CHECK(spectral_norm(X) == doctest::Approx(sv.maxCoeff()).epsilon(1e-12));
    CHECK(schatten_norm(X, Schatten::Two) == doctest::Approx(X.norm()).epsilon(1e-12));
    ComplexMatrix D = ComplexMatrix::Zero(2, 2);
    D(0, 0) = 1.0;
    D(1, 1) = -2.0;
    CHECK(nuclear_norm(D) == doctest::Approx(3.0));
}

TEST_CASE("norm duality |<A,B>| <= ||A||_1 ||B||_inf") {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const ComplexMatrix A = gaussian_matrix(3, 3, Field::Complex, rng);
        const ComplexMatrix B = gaussian_matrix(3, 3, Field::Complex, rng);
        CHECK(std::abs(inner(A, B)) <= nuclear_norm(A) * spectral_norm(B) + 1e-12);
    }
    // Equality attained at the sign matrix.
    const ComplexMatrix X = gaussian_matrix(3, 3, Field::Complex, rng);
    const ComplexMatrix S = sign_matrix(X);
    CHECK(std::abs(inner(S.adjoint(), X) - nuclear_norm(X)) < 1e-10);
    CHECK(spectral_norm(S) == doctest::Approx(1.0));
}

TEST_CASE("absolute values and sqrt_psd") {
    Rng rng(4);
    const ComplexMatrix X = gaussian_matrix(3, 2, Field::Complex, rng);
    const AbsoluteValues a = absolute_values(X);
    CHECK((a.left * a.left - X * X.adjoint()).norm() < 1e-10);
    CHECK((a.right * a.right - X.adjoint() * X).norm() < 1e-10);
    CHECK(a.left.trace().real() == doctest::Approx(nuclear_norm(X)));
    const ComplexMatrix G = gaussian_matrix(3, 3, Field::Complex, rng);
    const ComplexMatrix P = G * G.adjoint();
    const ComplexMatrix R = sqrt_psd(P);
    CHECK((R * R - P).norm() < 1e-10);
    CHECK(is_hermitian(R));
    ComplexMatrix N = ComplexMatrix::Identity(2, 2);
    N(1, 1) = -1.0;
    CHECK_THROWS_AS(sqrt_psd(N), NotPsdError);
}

TEST_CASE("partial trace and identity lift against explicit sums") {
    Rng rng(5);
    const Index dW = 2, dV = 3;
    const ComplexMatrix X = gaussian_matrix(dW * dV, dW * dV, Field::Complex, rng);
    ComplexMatrix oracle = ComplexMatrix::Zero(dV, dV);
    for (Index w = 0; w < dW; ++w)
        for (Index i = 0; i < dV; ++i)
            for (Index j = 0; j < dV; ++j) oracle(i, j) += X(w * dV + i, w * dV + j);
    CHECK((partial_trace_first(X, dW, dV) - oracle).norm() < 1e-12);
    // Adjointness: <1 (x) Y, X> = <Y, Tr_W X>.
    const ComplexMatrix Y = gaussian_matrix(dV, dV, Field::Complex, rng);
    CHECK(std::abs(inner(lift_identity_first(Y, dW), X) - inner(Y, oracle)) < 1e-10);
    CHECK_THROWS_AS(partial_trace_first(X, 4, 3), ShapeError);
}

TEST_CASE("vec is row-major and kron matches the index convention") {
    ComplexMatrix X(2, 3);
    X << 1, 2, 3, 4, 5, 6;
    const ComplexVector v = vec(X);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j) CHECK(v(i * 3 + j) == X(i, j));
    CHECK((devec(v, 2, 3) - X).norm() == 0.0);
    Rng rng(6);
    const ComplexMatrix A = gaussian_matrix(2, 2, Field::Complex, rng);
    const ComplexMatrix B = gaussian_matrix(3, 3, Field::Complex, rng);
    const ComplexMatrix K = kron(A, B);
    for (Index a = 0; a < 2; ++a)
        for (Index b = 0; b < 2; ++b)
            for (Index i = 0; i < 3; ++i)
                for (Index j = 0; j < 3; ++j) CHECK(std::abs(K(a * 3 + i, b * 3 + j) - A(a, b) * B(i, j)) < 1e-14);
    // vec(A X B) = (A (x) B^T) vec(X).
    const ComplexMatrix Z = gaussian_matrix(2, 3, Field::Complex, rng);
    CHECK((vec(A * Z * B) - kron(A, B.transpose()) * vec(Z)).norm() < 1e-12);
}

TEST_CASE("bipartite operator validates shape") {
    CHECK_THROWS_AS(BipartiteOperator(ComplexMatrix::Zero(5, 5), 2, 3), ShapeError);
    const BipartiteOperator op(ComplexMatrix::Identity(6, 6), 2, 3);
    CHECK(op.dim() == 6);
    CHECK_THROWS_AS(op + BipartiteOperator(ComplexMatrix::Identity(6, 6), 3, 2), ShapeError);
}

TEST_CASE("svd rejects non-finite input") {
    ComplexMatrix X = ComplexMatrix::Identity(2, 2);
    X(0, 1) = std::nan("");
    CHECK_THROWS_AS(svd(X), NumericError);
}

TEST_CASE("mix64 is deterministic and spreads nearby inputs") {
    CHECK(mix64(0) == mix64(0));
    CHECK(mix64(1) != mix64(2));
    Rng a(7), b(7);
    CHECK((gaussian_matrix(2, 2, Field::Complex, a) - gaussian_matrix(2, 2, Field::Complex, b)).norm() == 0.0);
    Rng c(8);
    const ComplexVector u = random_unit_vector(5, Field::Complex, c);
    CHECK(u.norm() == doctest::Approx(1.0));
}

TEST_CASE("svd of diagonal and zero inputs") {
    ComplexMatrix D = ComplexMatrix::Zero(2, 2);
    D(0, 0) = 3.0;
    D(1, 1) = 1.0;
    const Svd s = svd(D);
    CHECK(s.sigma(0) == doctest::Approx(3.0));
    CHECK(s.sigma(1) == doctest::Approx(1.0));
    CHECK((s.U.cwiseAbs() - RealMatrix::Identity(2, 2)).norm() < 1e-14);
    CHECK((s.V.cwiseAbs() - RealMatrix::Identity(2, 2)).norm() < 1e-14);
    CHECK(svd(ComplexMatrix::Zero(2, 2)).sigma.norm() == 0.0);
}

TEST_CASE("square roots of diagonal inputs") {
    ComplexMatrix D = ComplexMatrix::Zero(2, 2);
    D(0, 0) = 4.0;
    D(1, 1) = 9.0;
    const ComplexMatrix R = sqrt_psd(D);
    CHECK(std::abs(R(0, 0) - 2.0) < 1e-14);
    CHECK(std::abs(R(1, 1) - 3.0) < 1e-14);
    CHECK(std::abs(R(0, 1)) < 1e-14);
    CHECK(sqrt_psd(ComplexMatrix::Zero(3, 3)).norm() == 0.0);
}

TEST_CASE("sign matrix special cases") {
    Rng rng(9);
    const ComplexMatrix G = gaussian_matrix(3, 3, Field::Complex, rng);
    const ComplexMatrix P = G * G.adjoint() + ComplexMatrix::Identity(3, 3);
    CHECK((sign_matrix(P) - ComplexMatrix::Identity(3, 3)).norm() < 1e-10);

    ComplexMatrix N = ComplexMatrix::Zero(2, 2);
    N(0, 1) = 1.0;
    const ComplexMatrix S = sign_matrix(N);
    CHECK((N * S - sqrt_psd(N * N.adjoint())).norm() < 1e-12);
    ComplexMatrix e11 = ComplexMatrix::Zero(2, 2);
    e11(0, 0) = 1.0;
    CHECK((N * S - e11).norm() < 1e-12);

    ComplexMatrix H = ComplexMatrix::Zero(2, 2);
    H(0, 0) = 1.0;
    H(1, 1) = -2.0;
    ComplexMatrix sgn = ComplexMatrix::Zero(2, 2);
    sgn(0, 0) = 1.0;
    sgn(1, 1) = -1.0;
    CHECK((sign_matrix(H) - sgn).norm() < 1e-12);
}

TEST_CASE("partial trace special cases") {
    Rng rng(10);
    const ComplexMatrix X = gaussian_matrix(3, 3, Field::Complex, rng);
    CHECK((partial_trace_first(kron(ComplexMatrix(ComplexMatrix::Identity(2, 2)), X), 2, 3) - 2.0 * X).norm() < 1e-12);
    const ComplexVector omega = vec(ComplexMatrix::Identity(2, 2));
    CHECK((partial_trace_first(omega * omega.adjoint(), 2, 2) - ComplexMatrix::Identity(2, 2)).norm() < 1e-14);
    const ComplexMatrix Y = gaussian_matrix(6, 6, Field::Complex, rng);
    CHECK(std::abs(partial_trace_first(Y, 3, 2).trace() - Y.trace()) < 1e-12);
}

TEST_CASE("schatten norms of simple matrices") {
    ComplexMatrix D = ComplexMatrix::Zero(2, 2);
    D(0, 0) = 1.0;
    D(1, 1) = -2.0;
    CHECK(schatten_norm(D, Schatten::Two) == doctest::Approx(std::sqrt(5.0)));
    CHECK(spectral_norm(D) == doctest::Approx(2.0));
    Rng rng(11);
    const ComplexMatrix U = Eigen::HouseholderQR<ComplexMatrix>(gaussian_matrix(4, 4, Field::Complex, rng)).householderQ();
    CHECK(nuclear_norm(U) == doctest::Approx(4.0));
    CHECK(spectral_norm(U) == doctest::Approx(1.0));
    const ComplexMatrix X = gaussian_matrix(3, 3, Field::Complex, rng);
    CHECK(nuclear_norm(X) == doctest::Approx(svd(X).sigma.sum()));
}

TEST_CASE("vec and kron identities") {
    ComplexMatrix E12 = ComplexMatrix::Zero(2, 2);
    E12(0, 1) = 1.0;
    ComplexVector e(4);
    e << 0.0, 1.0, 0.0, 0.0;
    CHECK(vec(E12) == e);
    Rng rng(12);
    const ComplexMatrix R = gaussian_matrix(3, 4, Field::Complex, rng);
    CHECK(devec(vec(R), 3, 4) == R);
    const ComplexMatrix K = gaussian_matrix(3, 3, Field::Complex, rng);
    const ComplexMatrix I3 = ComplexMatrix::Identity(3, 3);
    CHECK((vec(K) - kron(K, I3) * vec(I3)).norm() < 1e-12);
    CHECK(kron(ComplexMatrix(ComplexMatrix::Identity(2, 2)), I3) == ComplexMatrix::Identity(6, 6));
    const ComplexMatrix A = gaussian_matrix(2, 2, Field::Complex, rng);
    const ComplexVector x = gaussian_vector(2, Field::Complex, rng), y = gaussian_vector(3, Field::Complex, rng);
    CHECK((kron(A, K) * kron(x, y) - kron(ComplexVector(A * x), ComplexVector(K * y))).norm() < 1e-12);
    CHECK(nuclear_norm(kron(A, K)) == doctest::Approx(nuclear_norm(A) * nuclear_norm(K)).epsilon(1e-10));
}
