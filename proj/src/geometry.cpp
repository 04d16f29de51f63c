#include "diamondrec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "diamondrec/choi.hpp"
#include "diamondrec/errors.hpp"

namespace diamondrec::geometry {

namespace {

struct Value {
    double f = 0.0;
    double err = 0.0;  // evaluation error estimate (square norm only)
};

Value eval(NormTag tag, const BipartiteOperator& X, const SquareNormOptions& opts) {
    if (tag == NormTag::Nuclear) return {nuclear_norm(X.mat()), 0.0};
    const SquareNormReport r = square_norm(X, opts);
    return {r.value, r.gap};
}

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw PreconditionError("descent grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw PreconditionError("descent grid must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw PreconditionError("descent grid must be strictly increasing");
    }
}

struct Step {
    double tau = 0.0;
    Value value;
};

// Convexity of t -> f(X + t u) - f(X) makes the scan stop at the first failure.
std::optional<Step> first_descent(NormTag tag, const BipartiteOperator& X, const BipartiteOperator& u,
                                  const std::vector<double>& grid, double f_base, double tol,
                                  const SquareNormOptions& opts) {
    for (double tau : grid) {
        const Value v = eval(tag, X + u * tau, opts);
        if (v.f <= f_base + tol) return Step{tau, v};
        break;
    }
    return std::nullopt;
}

std::optional<double> first_descent_nuclear(const ComplexMatrix& X, const ComplexMatrix& u,
                                            const std::vector<double>& grid) {
    const double f0 = nuclear_norm(X);
    const double tol = membership_tolerance(f0);
    for (double tau : grid) {
        if (nuclear_norm(X + tau * u) <= f0 + tol) return tau;
        break;
    }
    return std::nullopt;
}

bool is_real_matrix(const ComplexMatrix& X) { return X.imag().cwiseAbs().maxCoeff() == 0.0; }

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

ComplexMatrix normalized(const ComplexMatrix& M) {
    const double n = M.norm();
    return n > 0.0 ? ComplexMatrix(M / n) : M;
}

void require_projector(const ComplexMatrix& P, Index n, const char* name) {
    if (P.rows() != n || P.cols() != n) throw ShapeError(std::string("pinching_check: ") + name + " has the wrong order");
    const double scale = std::max(1.0, P.norm());
    if (!is_hermitian(P, 1e-9) || (P * P - P).norm() > 1e-9 * scale)
        throw PreconditionError(std::string("pinching_check: ") + name + " is not an orthogonal projector");
}

double schatten_power(const ComplexMatrix& M, Schatten p) {
    return p == Schatten::One ? nuclear_norm(M) : M.squaredNorm();
}

ComplexMatrix random_frobenius_scaled(Index n, double norm, Rng& rng) {
    return normalized(gaussian_matrix(n, n, Field::Complex, rng)) * norm;
}

struct Line {
    std::ostream& os;
    bool all = true;
    void operator()(bool ok, const std::string& name, const std::string& detail) {
        os << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
        all = all && ok;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void suite_descent(Line& line, Rng& rng) {
    const BipartiteOperator X(gaussian_matrix(4, 4, Field::Complex, rng), 2, 2);
    for (NormTag tag : {NormTag::Nuclear, NormTag::Square}) {
        const auto back = is_descent_direction(tag, X, X * -1.0, {1.0});
        line(back && back->tau == 1.0 && std::abs(back->f_step) <= 1e-7, "descent/" + to_string(tag) + "/minus_x",
             back ? "f(0) = " + fmt(back->f_step) : "no certificate");
        const auto out = is_descent_direction(tag, X, X);
        line(!out, "descent/" + to_string(tag) + "/plus_x", out ? "unexpected certificate" : "none");
    }

    // Rank-one base point; the scan must agree with a dense grid.
    const ComplexVector a = gaussian_vector(4, Field::Complex, rng);
    const ComplexVector b = gaussian_vector(4, Field::Complex, rng);
    const BipartiteOperator R(a * b.adjoint(), 2, 2);
    const std::vector<double> fine = geometric_grid(1e-6, 1e2, 400);
    int mismatches = 0, members = 0;
    for (int s = 0; s < 200; ++s) {
        const BipartiteOperator u = sample_direction(R, rng);
        const bool scan = is_descent_direction(NormTag::Nuclear, R, u).has_value();
        const double f0 = nuclear_norm(R.mat());
        bool brute = false;
        for (double tau : fine) brute = brute || nuclear_norm(R.mat() + tau * u.mat()) <= f0 + membership_tolerance(f0);
        mismatches += scan != brute;
        members += brute;
    }
    line(mismatches == 0, "descent/nuclear/brute_force",
         std::to_string(members) + "/200 members, " + std::to_string(mismatches) + " mismatches");
}

void suite_pinching(Line& line, Rng& rng) {
    double worst = std::numeric_limits<double>::infinity();
    std::uniform_int_distribution<int> dim(1, 5);
    for (int s = 0; s < 500; ++s) {
        const Index r = dim(rng), c = dim(rng);
        const ComplexMatrix Z = gaussian_matrix(r, c, Field::Complex, rng);
        const ComplexMatrix P = random_projector(r, std::uniform_int_distribution<Index>(0, r)(rng), rng);
        const ComplexMatrix Q = random_projector(c, std::uniform_int_distribution<Index>(0, c)(rng), rng);
        worst = std::min(worst, pinching_check(Z, P, Q, s % 2 ? Schatten::Two : Schatten::One));
    }
    line(worst >= -1e-9, "pinching/random", "min slack " + fmt(worst));

    double eq = 0.0;
    for (int s = 0; s < 20; ++s) {
        const ComplexMatrix Z = gaussian_matrix(3, 4, Field::Complex, rng);
        for (Schatten p : {Schatten::One, Schatten::Two}) {
            eq = std::max(eq, std::abs(pinching_check(Z, ComplexMatrix::Identity(3, 3), ComplexMatrix::Identity(4, 4), p)));
            eq = std::max(eq, std::abs(pinching_check(Z, ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(4, 4), p)));
        }
    }
    line(eq <= 1e-10, "pinching/equality", "max |slack| " + fmt(eq));
}

void suite_effective_rank(Line& line, Rng& rng) {
    for (Index r : {1, 2}) {
        const ComplexMatrix X =
            gaussian_matrix(4, r, Field::Complex, rng) * gaussian_matrix(r, 4, Field::Complex, rng);
        const EffectiveRankReport rep = effective_rank_bound_check(X, 500, rng);
        line(rep.holds() && rep.accepted == 500, "effective_rank/r=" + std::to_string(r),
             "max ratio " + fmt(rep.max_ratio) + " <= " + fmt(rep.bound) + " over " + std::to_string(rep.accepted));
    }
}

void suite_containment(Line& line, Rng& rng) {
    for (const BipartiteOperator& X : extremal_examples(rng)) {
        ContainmentOptions opts;
        opts.sandwich_samples = 4;
        const ContainmentReport rep = cone_containment_check(X, 200, rng, opts);
        line(rep.violations == 0 && rep.sandwich_violations == 0 && rep.certified == 200,
             "containment/" + std::to_string(X.dimW()) + "x" + std::to_string(X.dimV()),
             std::to_string(rep.certified) + " certified in " + std::to_string(rep.attempts) + ", " +
                 std::to_string(rep.violations) + " violations, " + std::to_string(rep.active_pairs) +
                 " active pairs, " + std::to_string(rep.solver_failures) + " unevaluated");
    }
}

}  // namespace

std::string to_string(NormTag t) { return t == NormTag::Nuclear ? "nuclear" : "square"; }

double evaluate(NormTag tag, const BipartiteOperator& X, const SquareNormOptions& opts) {
    return eval(tag, X, opts).f;
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) throw PreconditionError("geometric_grid: need 0 < lo < hi, points >= 2");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double ratio = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
    g.back() = hi;
    return g;
}

double membership_tolerance(double f_base) { return 1e-9 * (1.0 + f_base); }

bool DescentCertificate::recheck(const SquareNormOptions& opts, double extra) const {
    const double f0 = evaluate(tag, X, opts);
    const double f1 = evaluate(tag, X + u * tau, opts);
    return f1 <= f0 + membership_tolerance(f0) + extra;
}

std::optional<DescentCertificate> is_descent_direction(NormTag tag, const BipartiteOperator& X,
                                                       const BipartiteOperator& u, const std::vector<double>& grid,
                                                       const SquareNormOptions& opts) {
    if (X.mat().norm() == 0.0) throw PreconditionError("is_descent_direction: X = 0");
    if (u.dimW() != X.dimW() || u.dimV() != X.dimV()) throw ShapeError("is_descent_direction: u and X differ in dims");
    check_grid(grid);
    const double f0 = evaluate(tag, X, opts);
    const auto step = first_descent(tag, X, u, grid, f0, membership_tolerance(f0), opts);
    if (!step) return std::nullopt;
    return DescentCertificate{X, u, step->tau, tag, f0, step->value.f};
}

Index numerical_rank(const ComplexMatrix& X) {
    const RealVector s = svd(X).sigma;
    if (s.size() == 0 || s(0) == 0.0) return 0;
    return static_cast<Index>((s.array() > 1e-9 * s(0)).count());
}

ComplexMatrix tangent_projection(const ComplexMatrix& X, const ComplexMatrix& G) {
    if (G.rows() != X.rows() || G.cols() != X.cols()) throw ShapeError("tangent_projection: shapes differ");
    const Svd d = svd(X);
    const Index r = numerical_rank(X);
    const ComplexMatrix PU = d.U.leftCols(r) * d.U.leftCols(r).adjoint();
    const ComplexMatrix PV = d.V.leftCols(r) * d.V.leftCols(r).adjoint();
    return PU * G + G * PV - PU * G * PV;
}

BipartiteOperator sample_direction(const BipartiteOperator& X, Rng& rng) {
    const Field field = is_real_matrix(X.mat()) ? Field::Real : Field::Complex;
    const ComplexMatrix G = gaussian_matrix(X.dim(), X.dim(), field, rng);
    const double t = 3.0 * uniform01(rng);
    const ComplexMatrix D = 0.5 * (normalized(G) + normalized(tangent_projection(X.mat(), G)));
    return {-t * normalized(X.mat()) + D, X.dimW(), X.dimV()};
}

std::vector<BipartiteOperator> extremal_examples(Rng& rng) {
    std::vector<BipartiteOperator> out;
    out.push_back(sandwich_map(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)).choi());
    out.push_back(sandwich_map(random_unitary(2, rng), random_unitary(2, rng)).choi());
    out.push_back(sandwich_map(random_unitary(3, rng, UnitaryGroup::Orthogonal),
                                random_unitary(3, rng, UnitaryGroup::Orthogonal)).choi());
    out.push_back(random_channel(2, 2, 2, rng).choi());
    out.push_back(random_channel(2, 2, 3, rng).choi());
    return out;
}

ContainmentReport cone_containment_check(const BipartiteOperator& X, int samples, Rng& rng,
                                         const ContainmentOptions& opts) {
    const ExtremalityReport ext = extremality_check(X);
    if (!ext.extremal)
        throw PreconditionError("cone_containment_check: X is not extremal (residual " + std::to_string(ext.residual) +
                                ")");
    if (samples < 0) throw PreconditionError("cone_containment_check: negative sample count");
    check_grid(opts.grid);

    const double nuc0 = nuclear_norm(X.mat());
    const Value sq0 = eval(NormTag::Square, X, opts.norm);
    const double tol = membership_tolerance(sq0.f);
    const double base_err = std::abs(sq0.f - nuc0) + sq0.err;

    // Sandwiches (1 (x) A)(.)(1 (x) B) that attain the square norm at X.
    struct Pair {
        ComplexMatrix A, B;
        double f0;
    };
    std::vector<Pair> pairs;
    const double fro = std::sqrt(static_cast<double>(X.dimV()));
    for (int s = 0; s < opts.sandwich_samples; ++s) {
        ComplexMatrix A = random_frobenius_scaled(X.dimV(), fro, rng);
        ComplexMatrix B = random_frobenius_scaled(X.dimV(), fro, rng);
        const double f = sandwiched_nuclear_norm(X, A, B);
        if (std::abs(f - nuc0) <= opts.active_tol * (1.0 + nuc0)) pairs.push_back({std::move(A), std::move(B), f});
    }

    ContainmentReport rep;
    rep.active_pairs = static_cast<int>(pairs.size());
    const long max_attempts = static_cast<long>(samples) * opts.max_attempts_per_sample;
    while (rep.certified < samples && rep.attempts < max_attempts) {
        ++rep.attempts;
        const BipartiteOperator u = sample_direction(X, rng);
        std::optional<Step> step;
        try {
            step = first_descent(NormTag::Square, X, u, opts.grid, sq0.f, tol, opts.norm);
        } catch (const NumericError&) {
            ++rep.solver_failures;
            continue;
        }
        if (!step) continue;
        ++rep.certified;
        const double slack = tol + base_err + step->value.err + 1e-8 * (1.0 + sq0.f);
        const BipartiteOperator moved = X + u * step->tau;

        const double excess = nuclear_norm(moved.mat()) - nuc0 - slack;
        rep.worst_excess = std::max(rep.worst_excess, excess);
        if (excess > 0.0) ++rep.violations;
        for (const Pair& p : pairs) {
            const double e = sandwiched_nuclear_norm(moved, p.A, p.B) - p.f0 - slack;
            rep.worst_excess = std::max(rep.worst_excess, e);
            if (e > 0.0) ++rep.sandwich_violations;
        }
    }
    return rep;
}

double pinching_check(const ComplexMatrix& Z, const ComplexMatrix& P, const ComplexMatrix& Q, Schatten p) {
    if (p == Schatten::Inf) throw PreconditionError("pinching_check: only p = 1 and p = 2 are supported");
    require_projector(P, Z.rows(), "P");
    require_projector(Q, Z.cols(), "Q");
    const ComplexMatrix Pc = ComplexMatrix::Identity(P.rows(), P.cols()) - P;
    const ComplexMatrix Qc = ComplexMatrix::Identity(Q.rows(), Q.cols()) - Q;
    return schatten_power(Z, p) - schatten_power(P * Z * Q, p) - schatten_power(Pc * Z * Qc, p);
}

ComplexMatrix random_projector(Index n, Index k, Rng& rng) {
    if (k < 0 || k > n) throw PreconditionError("random_projector: need 0 <= k <= n");
    if (k == 0) return ComplexMatrix::Zero(n, n);
    const ComplexMatrix U = random_unitary(n, rng, UnitaryGroup::Unitary).leftCols(k);
    return U * U.adjoint();
}

EffectiveRankReport effective_rank_bound_check(const ComplexMatrix& X, int samples, Rng& rng,
                                               int max_attempts_per_sample) {
    EffectiveRankReport rep;
    rep.rank = numerical_rank(X);
    if (rep.rank == 0) throw PreconditionError("effective_rank_bound_check: X = 0");
    rep.bound = (1.0 + std::sqrt(2.0)) * std::sqrt(static_cast<double>(rep.rank));

    const Svd d = svd(X);
    const ComplexMatrix E = d.U.leftCols(rep.rank) * d.V.leftCols(rep.rank).adjoint();
    const Field field = is_real_matrix(X) ? Field::Real : Field::Complex;
    const ComplexMatrix Xn = X / X.norm();
    const std::vector<double> grid = geometric_grid(1e-2, 1e2, 24);

    const long max_attempts = static_cast<long>(samples) * max_attempts_per_sample;
    while (rep.accepted < samples && rep.attempts < max_attempts) {
        ++rep.attempts;
        const ComplexMatrix G = gaussian_matrix(X.rows(), X.cols(), field, rng);
        const ComplexMatrix T = tangent_projection(X, G);
        const ComplexMatrix Y = -uniform01(rng) * normalized(E) + uniform01(rng) * normalized(T) +
                                uniform01(rng) * normalized(G - T);
        if (Y.norm() == 0.0) continue;
        if (!first_descent_nuclear(Xn, Y / Y.norm(), grid)) continue;
        ++rep.accepted;
        rep.max_ratio = std::max(rep.max_ratio, nuclear_norm(Y) / Y.norm());
    }
    return rep;
}

double conic_singular_value_upper_bound(const MeasurementEnsemble& e, const BipartiteOperator& X, NormTag tag,
                                        int samples, Rng& rng, const SquareNormOptions& opts) {
    if (X.dimW() != e.dimW() || X.dimV() != e.dimV()) throw ShapeError("conic_singular_value_upper_bound: dims differ");
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        const BipartiteOperator u = sample_direction(X, rng);
        if (!is_descent_direction(tag, X, u, geometric_grid(), opts)) continue;
        best = std::min(best, apply_measurement(e, u).norm() / u.mat().norm());
    }
    return best;
}

std::vector<std::string> suite_names() { return {"descent", "pinching", "effective_rank", "containment", "all"}; }

bool run_suite(const std::string& name, std::uint64_t seed, std::ostream& log) {
    const auto names = suite_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw PreconditionError("run_suite: unknown suite '" + name + "'");
    Rng rng(seed);
    Line line{log};
    const bool all = name == "all";
    if (all || name == "descent") suite_descent(line, rng);
    if (all || name == "pinching") suite_pinching(line, rng);
    if (all || name == "effective_rank") suite_effective_rank(line, rng);
    if (all || name == "containment") suite_containment(line, rng);
    return line.all;
}

}  // namespace diamondrec::geometry
