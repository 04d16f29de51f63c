#pragma once

#include <optional>

#include "diamondrec/choi.hpp"
#include "diamondrec/conic.hpp"
#include "diamondrec/linalg.hpp"
#include "diamondrec/random.hpp"

namespace diamondrec {

struct SquareNormReport {
    double value = 0.0;         // dimV/2 (||Tr_W Y||_inf + ||Tr_W Z||_inf) at the optimum
    double primal_value = 0.0;  // Re Tr(X Z) of the maximisation form
    double dual_value = 0.0;    // same as value; kept for symmetry with the pair
    double gap = 0.0;           // |primal_value - dual_value|

    // Minimisation form: [[Y, -X], [-X^dagger, Z]] >= 0.
    ComplexMatrix Y;
    ComplexMatrix Z;
    // Maximisation form: [[1 (x) rho, Zp], [Zp^dagger, 1 (x) sigma]] >= 0,
    // Tr rho = Tr sigma = dimV, objective Re Tr(X Zp).
    ComplexMatrix primal_Z;
    ComplexMatrix rho;
    ComplexMatrix sigma;

    conic::SolveStatus status = conic::SolveStatus::MaxIters;
    conic::Residuals residuals;
    long iterations = 0;

    // Value of the maximisation form solved as a program of its own.
    std::optional<double> cross_check_value;
};

struct SquareNormOptions {
    conic::SolverOptions solver;
    bool cross_check = false;
};

/// ||X||_square via its semidefinite minimisation form. Primal witnesses are
/// recovered from the multipliers. Throws NumericError when the solver
/// does not reach an optimal status.
SquareNormReport square_norm(const BipartiteOperator& X, const SquareNormOptions& opts = {});

/// Solves only the maximisation form and returns its optimal value.
double square_norm_primal(const BipartiteOperator& X, const conic::SolverOptions& opts = {});

/// ||M||_diamond = ||J(M)||_square / dimV.
double diamond_norm(const OperatorMap& M, const SquareNormOptions& opts = {});

struct BoundsReport {
    double nuclear = 0.0;
    double square = 0.0;
    double spectral = 0.0;
    double lower_slack = 0.0;     // ||X||_sq - ||X||_1
    double upper_slack = 0.0;     // dimV ||X||_1 - ||X||_sq
    double spectral_slack = 0.0;  // dim(W (x) V) ||X||_inf - ||X||_sq

    bool holds(double tol) const noexcept {
        return lower_slack >= -tol && upper_slack >= -tol && spectral_slack >= -tol;
    }
};

BoundsReport check_bounds(const BipartiteOperator& X, const SquareNormOptions& opts = {});

struct ExtremalityReport {
    bool extremal = false;
    double residual = 0.0;
};

/// Flatness of Tr_W sqrt(X X^dagger) and Tr_W sqrt(X^dagger X), measured
/// relative to ||X||_1 / dimV. X = 0 is extremal.
ExtremalityReport extremality_check(const BipartiteOperator& X, double tol = 1e-8);

struct OptimalPointsReport {
    conic::KktReport kkt;      // standard form with the constructed pair
    ComplexMatrix Z_sharp;
    ComplexMatrix Y_sharp;
    double nuclear = 0.0;

    // Reduced pair: Zp = S_X, rho = sigma = 1 and Y = sqrt(X X^dagger), Z = sqrt(X^dagger X).
    double reduced_primal_value = 0.0;
    double reduced_dual_value = 0.0;
    double reduced_primal_infeasibility = 0.0;  // max(0, -lambda_min) of the primal block
    double reduced_dual_infeasibility = 0.0;    // max(0, -lambda_min) of the dual block

    double max_residual() const;
    bool ok(double tol) const { return max_residual() <= tol; }
};

/// Standard-form data (Xi, C, D) for ||X||_square with Z on
/// V (+) V (+) (W (x) V) (+) (W (x) V).
conic::StandardSdp watrous_sdp(const BipartiteOperator& X);

/// Builds the closed-form optimal pair for an extremal X and checks it
/// without solving. Throws PreconditionError when X is not extremal.
OptimalPointsReport verify_optimal_points(const BipartiteOperator& X, double tol = 1e-8);

/// max ||(1 (x) A) X (1 (x) B)||_1 over `samples` pairs with
/// ||A||_F = ||B||_F = sqrt(dimV); the pair A = B = 1 is always included.
double variational_lower_bound(const BipartiteOperator& X, int samples, Rng& rng);

/// ||(1 (x) A) X (1 (x) B)||_1.
double sandwiched_nuclear_norm(const BipartiteOperator& X, const ComplexMatrix& A, const ComplexMatrix& B);

}  // namespace diamondrec
