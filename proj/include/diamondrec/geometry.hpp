#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diamondrec/linalg.hpp"
#include "diamondrec/measure.hpp"
#include "diamondrec/norms.hpp"
#include "diamondrec/random.hpp"

// Sampled checks of descent-cone geometry for the nuclear and square norms.
namespace diamondrec::geometry {

enum class NormTag { Nuclear, Square };

std::string to_string(NormTag t);

double evaluate(NormTag tag, const BipartiteOperator& X, const SquareNormOptions& opts = {});

/// Ascending geometric grid of `points` steps on [lo, hi].
std::vector<double> geometric_grid(double lo = 1e-6, double hi = 1e2, int points = 24);

/// Membership tolerance 1e-9 (1 + f(X)).
double membership_tolerance(double f_base);

struct DescentCertificate {
    BipartiteOperator X;
    BipartiteOperator u;
    double tau = 0.0;
    NormTag tag = NormTag::Nuclear;
    double f_base = 0.0;  // f(X)
    double f_step = 0.0;  // f(X + tau u)

    double margin() const noexcept { return f_base - f_step; }
    /// Recomputes both values and checks the margin against the
    /// membership tolerance (plus `extra` for noisy evaluations).
    bool recheck(const SquareNormOptions& opts = {}, double extra = 0.0) const;
};

/// First tau in the (ascending) grid with f(X + tau u) <= f(X) + tol.
/// Scanning stops at the first failing step: t -> f(X + t u) - f(X) is
/// convex and zero at t = 0, so a failure at t excludes every larger t.
/// Throws PreconditionError for X = 0 or an empty grid, ShapeError for
/// mismatched dims.
std::optional<DescentCertificate> is_descent_direction(NormTag tag, const BipartiteOperator& X,
                                                       const BipartiteOperator& u,
                                                       const std::vector<double>& grid = geometric_grid(),
                                                       const SquareNormOptions& opts = {});

/// P_T(G) = P_U G + G P_V - P_U G P_V for the row and column spaces of X
/// (singular values below 1e-9 sigma_1 dropped).
ComplexMatrix tangent_projection(const ComplexMatrix& X, const ComplexMatrix& G);

/// Numerical rank with cut-off 1e-9 sigma_1.
Index numerical_rank(const ComplexMatrix& X);

/// u = -t X/||X||_F + (G/||G||_F + P_T(G)/||P_T(G)||_F) / 2 with t uniform
/// on [0, 3] and G Gaussian in the field of X.
BipartiteOperator sample_direction(const BipartiteOperator& X, Rng& rng);

/// Five extremal base points: identity channel (n = 2), a unitary pair
/// (n = 2), a real orthogonal pair (n = 3) and random channels of Kraus
/// rank 2 and 3 (n = 2).
std::vector<BipartiteOperator> extremal_examples(Rng& rng);

struct ContainmentOptions {
    SquareNormOptions norm;
    // Starts well above the square-norm evaluation noise (about 1e-8).
    std::vector<double> grid = geometric_grid(1e-2, 1e2, 24);
    int max_attempts_per_sample = 20;
    /// Extra random (A, B) pairs with ||A||_F = ||B||_F = sqrt(dimV); only
    /// pairs active at X are kept.
    int sandwich_samples = 0;
    double active_tol = 1e-6;
};

struct ContainmentReport {
    int attempts = 0;
    int certified = 0;          // square-norm descent directions found
    int violations = 0;         // of those, directions without a nuclear certificate
    int active_pairs = 0;       // sandwiches checked besides A = B = 1
    int sandwich_violations = 0;
    double worst_excess = 0.0;  // largest nuclear increase over the tolerance
    int solver_failures = 0;    // directions skipped because the square norm did not converge
};

/// Collects `samples` square-norm descent directions at the extremal X and
/// checks that each also descends for the nuclear norm (and for every
/// active sandwiched nuclear norm). The tolerance for a violation adds the
/// square-norm evaluation error to the membership tolerance. A direction
/// whose square norm cannot be evaluated is skipped, not certified.
/// Throws PreconditionError when X is not extremal.
ContainmentReport cone_containment_check(const BipartiteOperator& X, int samples, Rng& rng,
                                         const ContainmentOptions& opts = {});

/// ||Z||_p^p - ||P Z Q||_p^p - ||P' Z Q'||_p^p with P' = 1 - P. p must be
/// One or Two; P and Q must be orthogonal projectors within 1e-9.
double pinching_check(const ComplexMatrix& Z, const ComplexMatrix& P, const ComplexMatrix& Q, Schatten p);

/// Orthogonal projector onto a Haar-random subspace of dimension k.
ComplexMatrix random_projector(Index n, Index k, Rng& rng);

struct EffectiveRankReport {
    Index rank = 0;
    int attempts = 0;
    int accepted = 0;
    double max_ratio = 0.0;  // max ||Y||_1 / ||Y||_F over accepted Y
    double bound = 0.0;      // (1 + sqrt 2) sqrt(rank)
    bool holds() const noexcept { return max_ratio <= bound + 1e-6; }
};

/// Samples Y = -a UV^dagger + b P_T(G) + c P_T'(G) (a, b, c random weights)
/// until `samples` of them carry a nuclear descent certificate at X.
/// The grid starts at 1e-2 so that accepted directions lie in the cone
/// to within 1e-7 relative.
EffectiveRankReport effective_rank_bound_check(const ComplexMatrix& X, int samples, Rng& rng,
                                               int max_attempts_per_sample = 50);

/// min ||A(u)||_2 / ||u||_F over sampled directions certified for `tag`.
/// An upper bound on the minimum conic singular value, nothing more.
/// Returns infinity when no sample is certified.
double conic_singular_value_upper_bound(const MeasurementEnsemble& e, const BipartiteOperator& X, NormTag tag,
                                        int samples, Rng& rng, const SquareNormOptions& opts = {});

/// Named sampled suites: "descent", "pinching", "effective_rank",
/// "containment", "all". Writes one line per check and returns true when
/// all pass. Throws PreconditionError for an unknown name.
bool run_suite(const std::string& name, std::uint64_t seed, std::ostream& log);

std::vector<std::string> suite_names();

}  // namespace diamondrec::geometry
