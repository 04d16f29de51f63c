#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "diamondrec/choi.hpp"
#include "diamondrec/errors.hpp"
#include "diamondrec/geometry.hpp"

using namespace diamondrec;
using namespace diamondrec::geometry;

namespace {

BipartiteOperator identity_choi(Index n) {
    return sandwich_map(ComplexMatrix::Identity(n, n), ComplexMatrix::Identity(n, n)).choi();
}

// Brute-force membership: any grid step that does not increase f.
bool descends_somewhere(NormTag tag, const BipartiteOperator& X, const BipartiteOperator& u, const std::vector<double>& grid) {
    const double f0 = evaluate(tag, X);
    for (double t : grid)
        if (evaluate(tag, X + u * t) <= f0 + 1e-9 * (1.0 + f0)) return true;
    return false;
}

}  // namespace

TEST_CASE("grid and tolerance") {
    const std::vector<double> g = geometric_grid(1e-2, 1e2, 5);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == doctest::Approx(1e-2));
    CHECK(g[1] == doctest::Approx(1e-1));
    CHECK(g.back() == doctest::Approx(1e2));
    CHECK(membership_tolerance(3.0) == doctest::Approx(4e-9));
    CHECK_THROWS_AS(geometric_grid(1.0, 0.5, 4), PreconditionError);
}

TEST_CASE("shrinking towards zero is a descent direction, growing is not") {
    Rng rng(51);
    const BipartiteOperator X(gaussian_matrix(4, 4, Field::Complex, rng), 2, 2);
    for (NormTag tag : {NormTag::Nuclear, NormTag::Square}) {
        const auto c = is_descent_direction(tag, X, X * -1.0, {0.5});
        REQUIRE(c);
        CHECK(c->tau == 0.5);
        CHECK(c->f_step == doctest::Approx(0.5 * c->f_base).epsilon(1e-6));
        CHECK(c->margin() > 0.0);
        CHECK(c->recheck({}, 1e-7));
        CHECK_FALSE(is_descent_direction(tag, X, X, geometric_grid(1e-3, 1.0, 6)));
    }
}

TEST_CASE("early exit agrees with an exhaustive scan") {
    Rng rng(52);
    const std::vector<double> grid = geometric_grid(1e-3, 1e1, 9);
    const BipartiteOperator X = identity_choi(2);
    int positives = 0;
    for (int t = 0; t < 40; ++t) {
        const BipartiteOperator u = sample_direction(X, rng);
        const bool fast = is_descent_direction(NormTag::Nuclear, X, u, grid).has_value();
        CHECK(fast == descends_somewhere(NormTag::Nuclear, X, u, grid));
        positives += fast;
    }
    CHECK(positives > 0);
    CHECK(positives < 40);
}

TEST_CASE("descent preconditions") {
    const BipartiteOperator Z(ComplexMatrix::Zero(4, 4), 2, 2);
    const BipartiteOperator X = identity_choi(2);
    CHECK_THROWS_AS(is_descent_direction(NormTag::Nuclear, Z, X), PreconditionError);
    CHECK_THROWS_AS(is_descent_direction(NormTag::Nuclear, X, BipartiteOperator(ComplexMatrix::Zero(4, 4), 4, 1)),
                    ShapeError);
    CHECK_THROWS_AS(is_descent_direction(NormTag::Nuclear, X, X, {}), PreconditionError);
    CHECK(to_string(NormTag::Square) == "square");
}

TEST_CASE("tangent projection") {
    Rng rng(53);
    const ComplexMatrix X = gaussian_matrix(5, 2, Field::Complex, rng) * gaussian_matrix(2, 5, Field::Complex, rng);
    CHECK(numerical_rank(X) == 2);
    const ComplexMatrix G = gaussian_matrix(5, 5, Field::Complex, rng);
    const ComplexMatrix PG = tangent_projection(X, G);
    CHECK((tangent_projection(X, PG) - PG).norm() < 1e-10);
    CHECK((tangent_projection(X, X) - X).norm() < 1e-10);
    // The complement is orthogonal to T: <G - P_T G, P_T G> = 0.
    CHECK(std::abs(inner(G - PG, PG)) < 1e-10);
    // Direct formula with projectors built from an independent SVD.
    const Svd s = svd(X);
    const ComplexMatrix U = s.U.leftCols(2), V = s.V.leftCols(2);
    const ComplexMatrix PU = U * U.adjoint(), PV = V * V.adjoint();
    CHECK((PG - (PU * G + G * PV - PU * G * PV)).norm() < 1e-10);
    CHECK(numerical_rank(ComplexMatrix::Zero(3, 3)) == 0);
}

TEST_CASE("sampled directions stay in the field of the base point") {
    Rng rng(54);
    const BipartiteOperator Xr(gaussian_matrix(4, 4, Field::Real, rng), 2, 2);
    CHECK(sample_direction(Xr, rng).mat().imag().norm() == 0.0);
    const BipartiteOperator Xc(gaussian_matrix(4, 4, Field::Complex, rng), 2, 2);
    CHECK(sample_direction(Xc, rng).mat().imag().norm() > 0.0);
}

TEST_CASE("extremal examples are extremal") {
    Rng rng(55);
    const auto ex = extremal_examples(rng);
    CHECK(ex.size() == 5);
    for (const auto& X : ex) CHECK(extremality_check(X).extremal);
}

TEST_CASE("pinching inequalities") {
    Rng rng(56);
    for (int t = 0; t < 10; ++t) {
        const ComplexMatrix Z = gaussian_matrix(5, 5, Field::Complex, rng);
        const ComplexMatrix P = random_projector(5, 2, rng);
        const ComplexMatrix Q = random_projector(5, 3, rng);
        CHECK(pinching_check(Z, P, Q, Schatten::One) >= -1e-10);
        // Frobenius: the slack is exactly the off-diagonal blocks.
        const ComplexMatrix Pc = ComplexMatrix::Identity(5, 5) - P, Qc = ComplexMatrix::Identity(5, 5) - Q;
        const double off = (P * Z * Qc).squaredNorm() + (Pc * Z * Q).squaredNorm();
        CHECK(pinching_check(Z, P, Q, Schatten::Two) == doctest::Approx(off).epsilon(1e-10));
    }
    // Block-diagonal Z gives equality for p = 1.
    const ComplexMatrix P = random_projector(4, 2, rng);
    const ComplexMatrix Q = random_projector(4, 1, rng);
    const ComplexMatrix Pc = ComplexMatrix::Identity(4, 4) - P, Qc = ComplexMatrix::Identity(4, 4) - Q;
    const ComplexMatrix G = gaussian_matrix(4, 4, Field::Complex, rng);
    const ComplexMatrix Zb = P * G * Q + Pc * G * Qc;
    CHECK(std::abs(pinching_check(Zb, P, Q, Schatten::One)) < 1e-10);

    CHECK_THROWS_AS(pinching_check(G, P, Q, Schatten::Inf), PreconditionError);
    CHECK_THROWS_AS(pinching_check(G, 2.0 * P, Q, Schatten::One), PreconditionError);
}

TEST_CASE("random projectors") {
    Rng rng(57);
    const ComplexMatrix P = random_projector(6, 4, rng);
    CHECK((P * P - P).norm() < 1e-12);
    CHECK((P - P.adjoint()).norm() < 1e-12);
    CHECK(P.trace().real() == doctest::Approx(4.0));
}

TEST_CASE("effective rank bound on nuclear descent directions") {
    Rng rng(58);
    for (Index r : {1, 2}) {
        const ComplexMatrix X = gaussian_matrix(4, r, Field::Complex, rng) * gaussian_matrix(r, 4, Field::Complex, rng);
        const EffectiveRankReport rep = effective_rank_bound_check(X, 60, rng);
        CHECK(rep.rank == r);
        CHECK(rep.accepted == 60);
        CHECK(rep.bound == doctest::Approx((1.0 + std::sqrt(2.0)) * std::sqrt(static_cast<double>(r))));
        CHECK(rep.holds());
    }
}

TEST_CASE("square-norm descent directions descend for the nuclear norm") {
    Rng rng(59);
    ContainmentOptions opts;
    opts.sandwich_samples = 10;
    const ContainmentReport rep = cone_containment_check(identity_choi(2), 15, rng, opts);
    CHECK(rep.certified == 15);
    CHECK(rep.violations == 0);
    CHECK(rep.sandwich_violations == 0);
    CHECK(rep.attempts >= rep.certified);

    ComplexMatrix E = ComplexMatrix::Zero(4, 4);
    E(0, 0) = 1.0;
    CHECK_THROWS_AS(cone_containment_check(BipartiteOperator(E, 2, 2), 1, rng), PreconditionError);
}

TEST_CASE("conic singular value upper bound lies within the operator's spectrum") {
    Rng rng(60);
    const MeasurementEnsemble e = gaussian_ensemble(20, 2, 2, Field::Complex, rng);
    // Realify A : C^16 -> C^20 and take its extreme singular values.
    RealMatrix A(40, 32);
    for (Index i = 0; i < 20; ++i) {
        const ComplexVector a = vec(e.functionals[static_cast<std::size_t>(i)].transpose());
        for (Index k = 0; k < 16; ++k) {
            A(i, k) = a(k).real();
            A(i, 16 + k) = -a(k).imag();
            A(20 + i, k) = a(k).imag();
            A(20 + i, 16 + k) = a(k).real();
        }
    }
    const Eigen::JacobiSVD<RealMatrix> s(A);
    const double v = conic_singular_value_upper_bound(e, identity_choi(2), NormTag::Nuclear, 20, rng);
    CHECK(v >= s.singularValues().minCoeff() - 1e-9);
    CHECK(v <= s.singularValues().maxCoeff() + 1e-9);
}

TEST_CASE("suite runner") {
    std::ostringstream log;
    CHECK(run_suite("pinching", 3, log));
    CHECK(log.str().find("PASS") != std::string::npos);
    CHECK(log.str().find("FAIL") == std::string::npos);
    CHECK_THROWS_AS(run_suite("bogus", 1, log), PreconditionError);
    CHECK(suite_names().size() == 5);
}

TEST_CASE("the direction -X is certified at tau = 1") {
    Rng rng(61);
    const BipartiteOperator X(gaussian_matrix(4, 4, Field::Complex, rng), 2, 2);
    for (NormTag tag : {NormTag::Nuclear, NormTag::Square}) {
        const auto c = is_descent_direction(tag, X, X * -1.0, {1.0});
        REQUIRE(c);
        CHECK(std::abs(c->f_step) < 1e-9);
    }
}

TEST_CASE("the trivial direction -X meets the effective rank bound") {
    Rng rng(62);
    for (Index r : {1, 2, 4}) {
        const ComplexMatrix X = gaussian_matrix(4, r, Field::Complex, rng) * gaussian_matrix(r, 4, Field::Complex, rng);
        const Svd s = svd(X);
        CHECK(s.sigma.sum() / s.sigma.norm() <= std::sqrt(static_cast<double>(r)) + 1e-12);
    }
}
