#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "diamondrec/choi.hpp"
#include "diamondrec/errors.hpp"

using namespace diamondrec;

TEST_CASE("choi of apply inverts apply_map") {
    Rng rng(11);
    const ComplexMatrix L = gaussian_matrix(3, 2, Field::Complex, rng);
    const LinearMap f = [&](const ComplexMatrix& X) -> ComplexMatrix { return L * X * L.adjoint() + 0.5 * L * X.transpose() * L.adjoint(); };
    const OperatorMap M = choi_of_apply(f, 2, 3);
    CHECK(M.dimV() == 2);
    CHECK(M.dimW() == 3);
    for (int t = 0; t < 3; ++t) {
        const ComplexMatrix rho = gaussian_matrix(2, 2, Field::Complex, rng);
        CHECK((apply_map(M, rho) - f(rho)).norm() < 1e-12);
    }
    CHECK_THROWS_AS(apply_map(M, ComplexMatrix::Zero(3, 3)), ShapeError);
}

TEST_CASE("choi entries follow the bipartite convention") {
    // Identity map on C^2: J = sum E_ij (x) E_ij, the unnormalised maximally entangled projector.
    const OperatorMap M = choi_of_apply([](const ComplexMatrix& X) { return X; }, 2, 2);
    const ComplexVector omega = vec(ComplexMatrix::Identity(2, 2));
    CHECK((M.choi().mat() - omega * omega.adjoint()).norm() < 1e-14);
}

TEST_CASE("kraus choi agrees with direct application") {
    Rng rng(12);
    const KrausSet K = random_kraus(2, 3, 2, rng);
    const OperatorMap M = kraus_to_choi(K);
    const ComplexMatrix rho = gaussian_matrix(2, 2, Field::Complex, rng);
    ComplexMatrix direct = ComplexMatrix::Zero(3, 3);
    for (const auto& k : K.operators) direct += k * rho * k.adjoint();
    CHECK((apply_map(M, rho) - direct).norm() < 1e-12);
    const CptStatus s = is_cpt(M);
    CHECK(s.cp);
    CHECK(s.tp);
}

TEST_CASE("sandwich map matches its action") {
    Rng rng(13);
    for (int t = 0; t < 4; ++t) {
        const ComplexMatrix L = gaussian_matrix(3, 2, Field::Complex, rng);
        const ComplexMatrix R = gaussian_matrix(2, 3, Field::Complex, rng);
        const OperatorMap S = sandwich_map(L, R);
        const OperatorMap ref = choi_of_apply([&](const ComplexMatrix& X) -> ComplexMatrix { return L * X * R; }, 2, 3);
        CHECK((S.choi().mat() - ref.choi().mat()).norm() < 1e-12);
        // Rank one: x y^dagger with y = (R^dagger (x) 1) vec(1).
        const ComplexVector x = kron(L, ComplexMatrix(ComplexMatrix::Identity(2, 2))) * vec(ComplexMatrix::Identity(2, 2));
        const ComplexVector y = kron(ComplexMatrix(R.adjoint()), ComplexMatrix(ComplexMatrix::Identity(2, 2))) * vec(ComplexMatrix::Identity(2, 2));
        CHECK((S.choi().mat() - x * y.adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("random unitaries") {
    Rng rng(14);
    const ComplexMatrix U = random_unitary(4, rng);
    CHECK((U.adjoint() * U - ComplexMatrix::Identity(4, 4)).norm() < 1e-12);
    const ComplexMatrix O = random_unitary(3, rng, UnitaryGroup::Orthogonal);
    CHECK(O.imag().norm() == 0.0);
    CHECK((O.adjoint() * O - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("random kraus preconditions") {
    Rng rng(15);
    CHECK_THROWS_AS(random_kraus(4, 1, 2, rng), PreconditionError);
    CHECK_THROWS_AS(random_kraus(0, 1, 2, rng), ShapeError);
    const KrausSet K = random_kraus(2, 2, 3, rng);
    CHECK(K.rank() == 3);
    CHECK_THROWS_AS(sandwich_map(ComplexMatrix::Zero(3, 2), ComplexMatrix::Zero(2, 2)), ShapeError);
    ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
    for (const auto& k : K.operators) sum += k.adjoint() * k;
    CHECK((sum - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("non-linear maps are rejected") {
    const LinearMap bad = [](const ComplexMatrix& X) -> ComplexMatrix {
        return X + ComplexMatrix::Identity(X.rows(), X.cols());
    };
    CHECK_THROWS_AS(choi_of_apply(bad, 2, 2), PreconditionError);
}

TEST_CASE("choi matrices of simple maps") {
    Rng rng(16);
    // Tr(X) 1_W / dimW has Choi matrix (1_W (x) 1_V) / dimW.
    const OperatorMap dep = choi_of_apply([](const ComplexMatrix& X) -> ComplexMatrix {
        return X.trace() * ComplexMatrix::Identity(3, 3) / 3.0;
    }, 2, 3);
    CHECK((dep.choi().mat() - ComplexMatrix::Identity(6, 6) / 3.0).norm() < 1e-14);

    const OperatorMap id = choi_of_apply([](const ComplexMatrix& X) { return X; }, 3, 3);
    const ComplexMatrix rho = gaussian_matrix(3, 3, Field::Complex, rng);
    CHECK((apply_map(id, rho) - rho).norm() < 1e-14);

    const ComplexMatrix U = random_unitary(2, rng), V = random_unitary(2, rng);
    const ComplexMatrix X = gaussian_matrix(2, 2, Field::Complex, rng);
    CHECK((apply_map(sandwich_map(U, V), X) - U * X * V).norm() < 1e-12);
}

TEST_CASE("kraus choi special cases") {
    Rng rng(17);
    const ComplexVector omega = vec(ComplexMatrix::Identity(2, 2));
    const OperatorMap one = kraus_to_choi({{ComplexMatrix::Identity(2, 2)}});
    CHECK((one.choi().mat() - omega * omega.adjoint()).norm() < 1e-14);

    const OperatorMap U = kraus_to_choi({{random_unitary(3, rng)}});
    const Svd s = svd(U.choi().mat());
    CHECK(s.sigma(1) < 1e-12);
    CHECK(U.choi().mat().trace().real() == doctest::Approx(3.0));
    CHECK(is_cpt(U).cp);

    const KrausSet K = random_kraus(2, 2, 2, rng);
    const OperatorMap ref = choi_of_apply([&](const ComplexMatrix& r) -> ComplexMatrix {
        ComplexMatrix out = ComplexMatrix::Zero(2, 2);
        for (const auto& k : K.operators) out += k * r * k.adjoint();
        return out;
    }, 2, 2);
    CHECK((kraus_to_choi(K).choi().mat() - ref.choi().mat()).norm() < 1e-12);
}

TEST_CASE("channel classification") {
    Rng rng(18);
    const CptStatus id = is_cpt(sandwich_map(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)));
    CHECK(id.cp);
    CHECK(id.tp);
    const ComplexMatrix U = random_unitary(2, rng), V = random_unitary(2, rng);
    const CptStatus uv = is_cpt(sandwich_map(U, V));
    CHECK_FALSE(uv.cp);
    CHECK_FALSE(uv.tp);
    for (int t = 0; t < 5; ++t) {
        const CptStatus s = is_cpt(random_channel(2, 3, 1 + t % 3, rng));
        CHECK(s.cp);
        CHECK(s.tp);
    }
}

TEST_CASE("haar unitaries") {
    Rng rng(19);
    const ComplexMatrix u = random_unitary(1, rng);
    CHECK(std::abs(u(0, 0)) == doctest::Approx(1.0));
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const ComplexMatrix W = random_unitary(3, rng);
        worst = std::max(worst, (W.adjoint() * W - ComplexMatrix::Identity(3, 3)).norm());
    }
    CHECK(worst <= 1e-10);
    // |U_11|^2 ~ Beta(1, n - 1): mean 1/n, variance (n - 1)/(n^2 (n + 1)).
    const int draws = 10000;
    const double n = 3.0;
    double sum = 0.0;
    for (int t = 0; t < draws; ++t) sum += std::norm(random_unitary(3, rng)(0, 0));
    const double se = std::sqrt((n - 1.0) / (n * n * (n + 1.0)) / draws);
    CHECK(std::abs(sum / draws - 1.0 / n) <= 5.0 * se);
}

TEST_CASE("random channels") {
    Rng rng(20);
    const KrausSet K1 = random_kraus(3, 3, 1, rng);
    CHECK((K1.operators[0].adjoint() * K1.operators[0] - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
    CHECK((K1.operators[0] * K1.operators[0].adjoint() - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);

    const OperatorMap M = random_channel(2, 2, 2, rng);
    const Svd s = svd(M.choi().mat());
    CHECK(s.sigma(1) > 1e-6);
    CHECK(s.sigma(2) < 1e-12);
    for (int t = 0; t < 5; ++t)
        CHECK(random_channel(3, 2, 2 + t, rng).choi().mat().trace().real() == doctest::Approx(3.0));
}
