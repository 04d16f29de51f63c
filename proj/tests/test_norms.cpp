#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "diamondrec/choi.hpp"
#include "diamondrec/errors.hpp"
#include "diamondrec/norms.hpp"

using namespace diamondrec;

namespace {

BipartiteOperator random_op(Index dW, Index dV, Rng& rng) {
    return {gaussian_matrix(dW * dV, dW * dV, Field::Complex, rng), dW, dV};
}

BipartiteOperator e11_product() {
    ComplexMatrix X = ComplexMatrix::Zero(4, 4);
    X(0, 0) = 1.0;
    return {X, 2, 2};
}

double min_eig(const ComplexMatrix& H) { return hermitian_eig(H).values.minCoeff(); }

ComplexMatrix block(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c, const ComplexMatrix& d) {
    ComplexMatrix M(a.rows() + c.rows(), a.cols() + b.cols());
    M << a, b, c, d;
    return M;
}

}  // namespace

TEST_CASE("square norm with trivial second factor is the nuclear norm") {
    Rng rng(11);
    for (int t = 0; t < 5; ++t) {
        const BipartiteOperator X(gaussian_matrix(3, 3, Field::Complex, rng), 3, 1);
        CHECK(square_norm(X).value == doctest::Approx(nuclear_norm(X.mat())).epsilon(1e-7));
    }
}

TEST_CASE("square norm of the maximally entangled projector") {
    const BipartiteOperator X = sandwich_map(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)).choi();
    // vec(1) vec(1)^T is extremal, so the square norm equals the nuclear norm 2.
    CHECK(extremality_check(X).extremal);
    CHECK(square_norm(X).value == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("square norm saturates the dimV upper bound on a product projector") {
    const BipartiteOperator X = e11_product();
    const double v = square_norm(X).value;
    CHECK(v == doctest::Approx(2.0).epsilon(1e-7));
    // Lower certificate: A = B = sqrt(2) e1 e1^T attains 2.
    ComplexMatrix A = ComplexMatrix::Zero(2, 2);
    A(0, 0) = std::sqrt(2.0);
    CHECK(sandwiched_nuclear_norm(X, A, A) == doctest::Approx(2.0));
    CHECK(check_bounds(X).upper_slack == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
}

TEST_CASE("primal and dual witnesses certify the value") {
    Rng rng(12);
    for (auto [dW, dV] : {std::pair<Index, Index>{2, 2}, {2, 3}, {3, 2}}) {
        const BipartiteOperator X = random_op(dW, dV, rng);
        const SquareNormReport r = square_norm(X);
        const double tol = 1e-6 * (1.0 + r.value);

        // Dual (minimisation) witness: feasibility and objective.
        const ComplexMatrix M = block(r.Y, -X.mat(), -X.mat().adjoint(), r.Z);
        CHECK(min_eig(hermitian_part(M)) >= -tol);
        const double up = 0.5 * static_cast<double>(dV) *
                          (spectral_norm(partial_trace_first(r.Y, dW, dV)) + spectral_norm(partial_trace_first(r.Z, dW, dV)));
        CHECK(up == doctest::Approx(r.value).epsilon(1e-6));

        // Primal (maximisation) witness.
        CHECK(r.rho.trace().real() == doctest::Approx(static_cast<double>(dV)).epsilon(1e-6));
        CHECK(r.sigma.trace().real() == doctest::Approx(static_cast<double>(dV)).epsilon(1e-6));
        const ComplexMatrix P = block(lift_identity_first(r.rho, dW), r.primal_Z, r.primal_Z.adjoint(),
                                      lift_identity_first(r.sigma, dW));
        CHECK(min_eig(hermitian_part(P)) >= -tol);
        CHECK(r.gap <= tol);
        CHECK(r.value >= nuclear_norm(X.mat()) - tol);
    }
}

TEST_CASE("explicit maximisation form and standard form agree with the value") {
    Rng rng(13);
    const BipartiteOperator X = random_op(2, 2, rng);
    SquareNormOptions opts;
    opts.cross_check = true;
    const SquareNormReport r = square_norm(X, opts);
    REQUIRE(r.cross_check_value);
    CHECK(*r.cross_check_value == doctest::Approx(r.value).epsilon(1e-6));

    const conic::StandardSdpSolution w = conic::solve_standard_sdp(watrous_sdp(X));
    REQUIRE(w.raw.status == conic::SolveStatus::Optimal);
    CHECK(w.primal_value == doctest::Approx(r.value).epsilon(1e-6));
}

TEST_CASE("square norm behaves as a norm") {
    Rng rng(14);
    for (int t = 0; t < 4; ++t) {
        const BipartiteOperator X = random_op(2, 2, rng);
        const BipartiteOperator Y = random_op(2, 2, rng);
        const double nx = square_norm(X).value;
        const double ny = square_norm(Y).value;
        CHECK(square_norm(X * -2.5).value == doctest::Approx(2.5 * nx).epsilon(1e-6));
        CHECK(square_norm(X + Y).value <= nx + ny + 1e-6);
    }
    const BipartiteOperator Z(ComplexMatrix::Zero(4, 4), 2, 2);
    CHECK(square_norm(Z).value == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("diamond norm of channels and trivial maps") {
    Rng rng(15);
    const OperatorMap zero(BipartiteOperator(ComplexMatrix::Zero(9, 9), 3, 3));
    CHECK(diamond_norm(zero) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    for (Index n : {2, 3}) {
        const OperatorMap id = sandwich_map(ComplexMatrix::Identity(n, n), ComplexMatrix::Identity(n, n));
        CHECK(diamond_norm(id) == doctest::Approx(1.0).epsilon(1e-6));
    }
    for (Index r = 1; r <= 4; ++r) CHECK(diamond_norm(random_channel(2, 2, r, rng)) == doctest::Approx(1.0).epsilon(1e-6));
    // Diamond norm scales with the map.
    const OperatorMap M = random_channel(2, 3, 2, rng);
    const OperatorMap M3(M.choi() * 3.0);
    CHECK(diamond_norm(M3) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("norm bounds") {
    Rng rng(16);
    const BipartiteOperator id = sandwich_map(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)).choi();
    CHECK(std::abs(check_bounds(id).lower_slack) <= 1e-6);
    for (int t = 0; t < 20; ++t) {
        const BipartiteOperator X = random_op(2, t % 2 ? 3 : 2, rng);
        const BoundsReport b = check_bounds(X);
        CHECK(b.holds(1e-7));
        CHECK(b.nuclear >= b.spectral);
    }
}

TEST_CASE("extremality") {
    Rng rng(17);
    for (Index n : {2, 3}) {
        const BipartiteOperator X = sandwich_map(random_unitary(n, rng), random_unitary(n, rng)).choi();
        const ExtremalityReport e = extremality_check(X);
        CHECK(e.extremal);
        CHECK(e.residual <= 1e-10);
        CHECK(square_norm(X).value == doctest::Approx(nuclear_norm(X.mat())).epsilon(1e-6));
    }
    CHECK(extremality_check(BipartiteOperator(ComplexMatrix::Zero(4, 4), 2, 2)).extremal);

    // Tr_W sqrt(X X^dagger) = e1 e1^T is not flat; residual by hand is
    // ||e1 e1^T - 1/2||_F / (1/2) = sqrt(2).
    const ExtremalityReport e = extremality_check(e11_product());
    CHECK_FALSE(e.extremal);
    CHECK(e.residual == doctest::Approx(std::sqrt(2.0)));

    // Channels have flat partial traces of |J| = J.
    CHECK(extremality_check(random_channel(3, 3, 2, rng).choi()).extremal);
}

TEST_CASE("closed-form optimal points") {
    Rng rng(18);
    const BipartiteOperator id = sandwich_map(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)).choi();
    const OptimalPointsReport r = verify_optimal_points(id);
    CHECK(r.kkt.primal_value == doctest::Approx(2.0));
    CHECK(r.kkt.dual_value == doctest::Approx(2.0));
    CHECK(r.ok(1e-8));

    const BipartiteOperator U = sandwich_map(random_unitary(3, rng), random_unitary(3, rng)).choi();
    const OptimalPointsReport ru = verify_optimal_points(U);
    CHECK(ru.max_residual() <= 1e-8);

    const OptimalPointsReport r3 = verify_optimal_points(U * 3.0);
    CHECK(r3.ok(1e-8));
    CHECK(r3.kkt.primal_value == doctest::Approx(3.0 * ru.kkt.primal_value));

    CHECK_THROWS_AS(verify_optimal_points(e11_product()), PreconditionError);
}

TEST_CASE("variational lower bound") {
    Rng rng(19);
    const BipartiteOperator X = random_op(2, 2, rng);
    CHECK(variational_lower_bound(X, 1, rng) == doctest::Approx(nuclear_norm(X.mat())));
    CHECK_THROWS_AS(variational_lower_bound(X, 0, rng), PreconditionError);

    const BipartiteOperator U = sandwich_map(random_unitary(2, rng), random_unitary(2, rng)).choi();
    CHECK(variational_lower_bound(U, 1, rng) == doctest::Approx(square_norm(U).value).epsilon(1e-6));

    // Same stream prefix: more samples can only raise the maximum.
    Rng a(5), b(5);
    const double few = variational_lower_bound(e11_product(), 50, a);
    const double many = variational_lower_bound(e11_product(), 3000, b);
    CHECK(many >= few);
    CHECK(many <= 2.0 + 1e-12);
    CHECK(many >= 1.6);

    for (int t = 0; t < 10; ++t) {
        const BipartiteOperator Y = random_op(2, t % 2 ? 3 : 2, rng);
        const double lb = variational_lower_bound(Y, 100, rng);
        const double sq = square_norm(Y).value;
        CHECK(lb >= nuclear_norm(Y.mat()) - 1e-6);
        CHECK(lb <= sq + 1e-6);
        CHECK(sq <= static_cast<double>(Y.dimV()) * nuclear_norm(Y.mat()) + 1e-6);
    }
}

TEST_CASE("real input uses a real program with the same value") {
    Rng rng(20);
    const ComplexMatrix R = gaussian_matrix(4, 4, Field::Real, rng);
    const double real_value = square_norm(BipartiteOperator(R, 2, 2)).value;
    // A global phase makes the data complex without changing the norm.
    const double complex_value = square_norm(BipartiteOperator(Complex(0.6, 0.8) * R, 2, 2)).value;
    CHECK(real_value == doctest::Approx(complex_value).epsilon(1e-6));
}

TEST_CASE("constructed primal point satisfies the standard-form constraint") {
    Rng rng(21);
    for (Index n : {2, 3}) {
        const BipartiteOperator X = sandwich_map(random_unitary(n, rng), random_unitary(n, rng)).choi();
        const conic::StandardSdp sdp = watrous_sdp(X);
        const OptimalPointsReport r = verify_optimal_points(X);
        CHECK((sdp.apply_xi(r.Z_sharp) - sdp.D).norm() <= 1e-10);
        CHECK(r.kkt.primal_value == doctest::Approx(nuclear_norm(X.mat())));
    }
}

TEST_CASE("brute-force sandwich search approaches the product-projector value") {
    // A = B = diag(a, b) with a^2 + b^2 = 2 gives ||(1 (x) A) X (1 (x) B)||_1 = a^2,
    // so a parameter scan reaches 2 from below.
    ComplexMatrix E = ComplexMatrix::Zero(4, 4);
    E(0, 0) = 1.0;
    const BipartiteOperator X(E, 2, 2);
    double best = 0.0;
    for (int k = 0; k <= 100; ++k) {
        const double th = 0.5 * 3.141592653589793 * k / 100.0;
        ComplexMatrix A = ComplexMatrix::Zero(2, 2);
        A(0, 0) = std::sqrt(2.0) * std::cos(th);
        A(1, 1) = std::sqrt(2.0) * std::sin(th);
        best = std::max(best, sandwiched_nuclear_norm(X, A, A));
    }
    CHECK(best == doctest::Approx(2.0));
    CHECK(square_norm(X).value == doctest::Approx(best).epsilon(1e-6));
}
