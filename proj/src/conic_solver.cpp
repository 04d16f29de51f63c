#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "diamondrec/conic.hpp"
#include "diamondrec/errors.hpp"

namespace diamondrec::conic {

namespace {

constexpr int kRuizPasses = 25;
constexpr double kMinScale = 1e-4;
constexpr double kMaxScale = 1e4;
constexpr int kInfeasibleChecks = 50;

double inf_norm(const RealVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Row scaling D and column scaling E with D A E roughly equilibrated.
// Rows of one soc or psd segment share a factor so the cone is preserved.
void equilibrate(SparseMatrix& A, const std::vector<ConeSegment>& cones, RealVector& D, RealVector& E) {
    const Index m = A.rows(), n = A.cols();
    D = RealVector::Ones(m);
    E = RealVector::Ones(n);
    for (int pass = 0; pass < kRuizPasses; ++pass) {
        RealVector rn = RealVector::Zero(m), cn = RealVector::Zero(n);
        for (Index k = 0; k < A.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
                const double a = std::abs(it.value());
                rn(it.row()) = std::max(rn(it.row()), a);
                cn(it.col()) = std::max(cn(it.col()), a);
            }
        Index row = 0;
        for (const auto& cone : cones) {
            const Index len = cone.rows();
            if ((cone.kind == ConeKind::Soc || cone.kind == ConeKind::Psd) && len > 0) {
                rn.segment(row, len).setConstant(rn.segment(row, len).maxCoeff());
            }
            row += len;
        }
        RealVector d(m), e(n);
        for (Index i = 0; i < m; ++i) {
            const double s = rn(i) > 1e-8 ? 1.0 / std::sqrt(rn(i)) : 1.0;
            d(i) = std::clamp(D(i) * s, kMinScale, kMaxScale) / D(i);
        }
        for (Index j = 0; j < n; ++j) {
            const double s = cn(j) > 1e-8 ? 1.0 / std::sqrt(cn(j)) : 1.0;
            e(j) = std::clamp(E(j) * s, kMinScale, kMaxScale) / E(j);
        }
        A = d.asDiagonal() * A * e.asDiagonal();
        D = D.cwiseProduct(d);
        E = E.cwiseProduct(e);
    }
}

// Type-II Anderson acceleration with a ridge-regularised least squares step.
class Anderson {
public:
    Anderson(Index dim, int memory) : memory_(memory), dF_(dim, std::max(memory, 1)), dG_(dim, std::max(memory, 1)) {}

    void reset() {
        count_ = 0;
        head_ = 0;
        has_prev_ = false;
    }

    // g = T(z), f = g - z; returns the next iterate.
    RealVector step(const RealVector& g, const RealVector& f) {
        if (memory_ <= 0) return g;
        if (has_prev_) {
            dF_.col(head_) = f - f_prev_;
            dG_.col(head_) = g - g_prev_;
            head_ = (head_ + 1) % memory_;
            count_ = std::min(count_ + 1, memory_);
        }
        f_prev_ = f;
        g_prev_ = g;
        has_prev_ = true;
        if (count_ == 0) return g;
        const auto F = dF_.leftCols(count_);
        RealMatrix gram = F.transpose() * F;
        const double reg = 1e-10 * gram.trace() / count_ + 1e-30;
        gram.diagonal().array() += reg;
        const RealVector gamma = gram.ldlt().solve(F.transpose() * f);
        RealVector next = g - dG_.leftCols(count_) * gamma;
        if (!gamma.allFinite() || !next.allFinite()) {
            reset();
            return g;
        }
        return next;
    }

private:
    int memory_;
    RealMatrix dF_, dG_;
    RealVector f_prev_, g_prev_;
    int count_ = 0;
    int head_ = 0;
    bool has_prev_ = false;
};

struct Unscaled {
    RealVector x, y, s;
    Residuals res;
    double pobj = 0.0, dobj = 0.0;
};

}  // namespace

SolverResult solve(const ConicProgram& program, const SolverOptions& opts) {
    program.validate();
    const Index n = program.num_vars();
    const Index m = program.num_rows();
    const Index l = n + m + 1;

    SparseMatrix A = program.A;
    RealVector D, E;
    if (opts.scaling) {
        equilibrate(A, program.cones, D, E);
    } else {
        D = RealVector::Ones(m);
        E = RealVector::Ones(n);
    }
    RealVector b = D.cwiseProduct(program.b);
    RealVector c = E.cwiseProduct(program.c);
    const double sb = b.norm() > 1e-12 ? 1.0 / b.norm() : 1.0;
    const double sc = c.norm() > 1e-12 ? 1.0 / c.norm() : 1.0;
    b *= sb;
    c *= sc;
    const SparseMatrix At = A.transpose();

    RealMatrix K = RealMatrix(At * A);
    K.diagonal().array() += 1.0;
    const Eigen::LLT<RealMatrix> chol(K);
    if (chol.info() != Eigen::Success) throw NumericError("solve: factorisation of I + A^T A failed");

    // (I + M)^{-1} with M = [[0, A^T], [-A, 0]].
    auto solve_m = [&](const RealVector& wx, const RealVector& wy, RealVector& ox, RealVector& oy) {
        ox = chol.solve(wx - At * wy);
        oy = wy + A * ox;
    };
    RealVector gx, gy;
    solve_m(c, b, gx, gy);
    const double hg = c.dot(gx) + b.dot(gy);

    auto project_c = [&](Eigen::Ref<RealVector> u) {
        Index row = n;
        for (const auto& cone : program.cones) {
            const Index len = cone.rows();
            project_cone(cone, u.segment(row, len), /*dual=*/true);
            row += len;
        }
        u(l - 1) = std::max(u(l - 1), 0.0);
    };

    // One relaxed Douglas-Rachford step on z = (u, v).
    RealVector px, py;
    auto apply_t = [&](const RealVector& z) -> RealVector {
        const auto u = z.head(l);
        const auto v = z.tail(l);
        const RealVector w = u + v;
        solve_m(w.head(n), w.segment(n, m), px, py);
        const double tau = (w(l - 1) + c.dot(px) + b.dot(py)) / (1.0 + hg);
        RealVector ut(l);
        ut.head(n) = px - gx * tau;
        ut.segment(n, m) = py - gy * tau;
        ut(l - 1) = tau;
        const RealVector ur = opts.relaxation * ut + (1.0 - opts.relaxation) * u;
        RealVector out(2 * l);
        out.head(l) = ur - v;
        project_c(out.head(l));
        out.tail(l) = v - ur + out.head(l);
        return out;
    };

    auto unscale = [&](const RealVector& z, Unscaled& r) -> bool {
        const double tau = z(l - 1);
        if (!(tau > 0.0)) return false;
        r.x = E.cwiseProduct(z.head(n)) / (tau * sb);
        r.y = D.cwiseProduct(z.segment(n, m)) / (tau * sc);
        const RealVector Ax = program.A * r.x;
        // The iterate's slack lags on tiny cone components (e.g. an SOC head of size eta),
        // so report the nearest cone point to b - Ax instead.
        r.s = program.b - Ax;
        Index row = 0;
        for (const auto& cone : program.cones) {
            project_cone(cone, r.s.segment(row, cone.rows()), /*dual=*/false);
            row += cone.rows();
        }
        const RealVector Aty = program.A.transpose() * r.y;
        const double cx = program.c.dot(r.x);
        const double by = program.b.dot(r.y);
        r.res.primal = inf_norm(Ax + r.s - program.b) /
                       (1.0 + std::max({inf_norm(Ax), inf_norm(r.s), inf_norm(program.b)}));
        r.res.dual = inf_norm(Aty + program.c) / (1.0 + std::max(inf_norm(Aty), inf_norm(program.c)));
        r.res.gap = std::abs(cx + by) / (1.0 + std::max(std::abs(cx), std::abs(by)));
        r.pobj = cx + program.objective_offset;
        r.dobj = -by + program.objective_offset;
        return true;
    };

    RealVector z = RealVector::Zero(2 * l);
    z(l - 1) = 1.0;
    z(2 * l - 1) = 1.0;

    Anderson aa(2 * l, opts.anderson_memory);
    RealVector g_last;
    double f_last = std::numeric_limits<double>::infinity();
    bool extrapolated = false;

    SolverResult result;
    Unscaled best;
    double best_score = std::numeric_limits<double>::infinity();
    int tiny_tau_checks = 0;

    for (long it = 1; it <= opts.max_iters; ++it) {
        RealVector g = apply_t(z);
        if (!g.allFinite()) throw NumericError("solve: non-finite iterate", it);
        const double fn = (g - z).norm();
        if (extrapolated && fn > f_last) {
            // Rejected acceleration: fall back to the last plain iterate.
            z = g_last;
            aa.reset();
            extrapolated = false;
            continue;
        }

        if (it % opts.check_every == 0 || it == opts.max_iters) {
            Unscaled cur;
            if (unscale(g, cur)) {
                tiny_tau_checks = 0;
                const double score = cur.res.max();
                if (score < best_score) {
                    best_score = score;
                    best = cur;
                    result.iterations = it;
                }
                if (score <= opts.tol) {
                    result.status = SolveStatus::Optimal;
                    result.iterations = it;
                    break;
                }
            }
            const double scale = g.head(l).cwiseAbs().maxCoeff();
            if (g(l - 1) <= 1e-9 * std::max(1.0, scale)) {
                if (++tiny_tau_checks >= kInfeasibleChecks) {
                    result.status = SolveStatus::InfeasibleSuspected;
                    result.iterations = it;
                    break;
                }
            }
        }

        g_last = g;
        f_last = fn;
        RealVector next = aa.step(g, g - z);
        extrapolated = !next.isApprox(g, 0.0);
        z = std::move(next);
    }

    if (result.status != SolveStatus::Optimal && best_score == std::numeric_limits<double>::infinity()) {
        best.x = RealVector::Zero(n);
        best.y = RealVector::Zero(m);
        best.s = RealVector::Zero(m);
        best.res = {1.0, 1.0, 1.0};
        best.pobj = best.dobj = std::numeric_limits<double>::quiet_NaN();
    }
    if (result.status == SolveStatus::MaxIters) result.iterations = opts.max_iters;
    result.x = std::move(best.x);
    result.y = std::move(best.y);
    result.s = std::move(best.s);
    result.residuals = best.res;
    result.primal_value = best.pobj;
    result.dual_value = best.dobj;
    return result;
}

}  // namespace diamondrec::conic
