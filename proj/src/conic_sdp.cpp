#include <algorithm>
#include <cmath>
#include <vector>

#include "diamondrec/conic.hpp"
#include "diamondrec/errors.hpp"

namespace diamondrec::conic {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

ComplexMatrix basis_element(Index n, Index k) {
    ComplexMatrix B = ComplexMatrix::Zero(n, n);
    if (k < n) {
        B(k, k) = 1.0;
        return B;
    }
    Index r = k - n;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            if (r == 0) {
                B(i, j) = B(j, i) = 1.0 / kSqrt2;
                return B;
            }
            if (r == 1) {
                B(i, j) = Complex(0.0, 1.0 / kSqrt2);
                B(j, i) = Complex(0.0, -1.0 / kSqrt2);
                return B;
            }
            r -= 2;
        }
    throw ShapeError("basis_element: index out of range");
}

double min_eig(const ComplexMatrix& H) {
    if (H.size() == 0) return 0.0;
    return hermitian_eig(hermitian_part(H)).values.minCoeff();
}

}  // namespace

RealVector hermitian_coords(const ComplexMatrix& H) {
    if (H.rows() != H.cols()) throw ShapeError("hermitian_coords: matrix is not square");
    const Index n = H.rows();
    RealVector v(n * n);
    Index k = 0;
    for (Index i = 0; i < n; ++i) v(k++) = H(i, i).real();
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const Complex h = 0.5 * (H(i, j) + std::conj(H(j, i)));
            v(k++) = kSqrt2 * h.real();
            v(k++) = kSqrt2 * h.imag();
        }
    return v;
}

ComplexMatrix from_hermitian_coords(const Eigen::Ref<const RealVector>& v, Index n) {
    if (v.size() != n * n) throw ShapeError("from_hermitian_coords: length is not n^2");
    ComplexMatrix H(n, n);
    Index k = 0;
    for (Index i = 0; i < n; ++i) H(i, i) = v(k++);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const Complex h(v(k) / kSqrt2, v(k + 1) / kSqrt2);
            H(i, j) = h;
            H(j, i) = std::conj(h);
            k += 2;
        }
    return H;
}

ComplexMatrix StandardSdp::apply_xi(const ComplexMatrix& Z) const {
    if (Z.rows() != n_in() || Z.cols() != n_in()) throw ShapeError("apply_xi: wrong input order");
    return from_hermitian_coords(xi * hermitian_coords(Z), n_out());
}

ComplexMatrix StandardSdp::apply_xi_adjoint(const ComplexMatrix& Y) const {
    if (Y.rows() != n_out() || Y.cols() != n_out()) throw ShapeError("apply_xi_adjoint: wrong input order");
    return from_hermitian_coords(xi.transpose() * hermitian_coords(Y), n_in());
}

StandardSdp build_standard_sdp(const ComplexMatrix& C, const ComplexMatrix& D, const LinearMap& xi) {
    if (C.rows() != C.cols() || D.rows() != D.cols()) throw ShapeError("build_standard_sdp: C and D must be square");
    if (!is_hermitian(C) || !is_hermitian(D)) throw PreconditionError("build_standard_sdp: C and D must be Hermitian");
    const Index n = C.rows();
    const Index k = D.rows();
    StandardSdp sdp{hermitian_part(C), hermitian_part(D), RealMatrix(k * k, n * n)};
    for (Index col = 0; col < n * n; ++col) {
        const ComplexMatrix out = xi(basis_element(n, col));
        if (out.rows() != k || out.cols() != k) throw ShapeError("build_standard_sdp: xi returned the wrong order");
        if (!is_hermitian(out)) throw PreconditionError("build_standard_sdp: xi does not preserve Hermiticity");
        sdp.xi.col(col) = hermitian_coords(out);
    }
    return sdp;
}

ConicProgram to_conic(const StandardSdp& sdp) {
    const Index n = sdp.n_in();
    const Index nv = n * n;
    const RealVector d = hermitian_coords(sdp.D);

    std::vector<Eigen::Triplet<double>> trips;
    Index row = 0;
    std::vector<double> rhs;
    for (Index r = 0; r < sdp.xi.rows(); ++r) {
        if (sdp.xi.row(r).cwiseAbs().maxCoeff() == 0.0 && d(r) == 0.0) continue;
        for (Index j = 0; j < nv; ++j)
            if (sdp.xi(r, j) != 0.0) trips.emplace_back(row, j, -sdp.xi(r, j));
        rhs.push_back(-d(r));
        ++row;
    }
    const Index n_eq = row;

    // Z >= 0 through its real embedding, one column per basis element.
    const Index order = 2 * n;
    const Index psd_rows = order * (order + 1) / 2;
    for (Index j = 0; j < nv; ++j) {
        const RealVector col = svec(embed_complex(basis_element(n, j)));
        for (Index r = 0; r < psd_rows; ++r)
            if (col(r) != 0.0) trips.emplace_back(n_eq + r, j, -col(r));
    }

    ConicProgram prog;
    prog.c = -hermitian_coords(sdp.C);
    prog.A.resize(n_eq + psd_rows, nv);
    prog.A.setFromTriplets(trips.begin(), trips.end());
    prog.b = RealVector::Zero(n_eq + psd_rows);
    for (Index r = 0; r < n_eq; ++r) prog.b(r) = rhs[static_cast<std::size_t>(r)];
    if (n_eq > 0) prog.cones.push_back({ConeKind::Zero, n_eq});
    prog.cones.push_back({ConeKind::Psd, order});
    return prog;
}

StandardSdpSolution solve_standard_sdp(const StandardSdp& sdp, const SolverOptions& opts) {
    const ConicProgram prog = to_conic(sdp);
    StandardSdpSolution sol;
    sol.raw = solve(prog, opts);
    const Index n = sdp.n_in();
    sol.Z = from_hermitian_coords(sol.raw.x, n);

    const RealVector d = hermitian_coords(sdp.D);
    RealVector ycoords = RealVector::Zero(sdp.xi.rows());
    Index row = 0;
    for (Index r = 0; r < sdp.xi.rows(); ++r) {
        if (sdp.xi.row(r).cwiseAbs().maxCoeff() == 0.0 && d(r) == 0.0) continue;
        ycoords(r) = -sol.raw.y(row++);
    }
    sol.Y = from_hermitian_coords(ycoords, sdp.n_out());
    sol.primal_value = inner(sdp.C, sol.Z).real();
    sol.dual_value = inner(sdp.D, sol.Y).real();
    return sol;
}

double KktReport::max_residual() const noexcept {
    return std::max({primal_feasibility, primal_cone, dual_feasibility, gap, slackness});
}

KktReport verify_kkt(const StandardSdp& sdp, const ComplexMatrix& Z, const ComplexMatrix& Y) {
    KktReport rep;
    const ComplexMatrix Zh = hermitian_part(Z);
    const ComplexMatrix Yh = hermitian_part(Y);
    const ComplexMatrix S = sdp.apply_xi_adjoint(Yh) - sdp.C;
    rep.primal_feasibility = (sdp.apply_xi(Zh) - sdp.D).norm();
    rep.primal_cone = std::max(0.0, -min_eig(Zh));
    rep.dual_feasibility = std::max(0.0, -min_eig(S));
    rep.primal_value = inner(sdp.C, Zh).real();
    rep.dual_value = inner(sdp.D, Yh).real();
    rep.gap = std::abs(rep.primal_value - rep.dual_value);
    rep.slackness = (S * Zh).norm();
    return rep;
}

double ConicKktReport::max_residual() const noexcept {
    return std::max({primal_residual, primal_cone, dual_residual, dual_cone, gap, complementarity});
}

ConicKktReport verify_kkt(const ConicProgram& program, const RealVector& x, const RealVector& y) {
    program.validate();
    if (x.size() != program.num_vars() || y.size() != program.num_rows())
        throw ShapeError("verify_kkt: x or y has the wrong length");
    const RealVector r = program.b - program.A * x;
    RealVector s = r;
    RealVector yk = y;
    Index row = 0;
    for (const auto& cone : program.cones) {
        const Index len = cone.rows();
        project_cone(cone, s.segment(row, len), false);
        project_cone(cone, yk.segment(row, len), true);
        row += len;
    }
    ConicKktReport rep;
    rep.primal_residual = r.size() ? (r - s).cwiseAbs().maxCoeff() : 0.0;
    rep.primal_cone = (r - s).norm();
    const RealVector dres = program.A.transpose() * y + program.c;
    rep.dual_residual = dres.size() ? dres.cwiseAbs().maxCoeff() : 0.0;
    rep.dual_cone = (y - yk).norm();
    rep.gap = std::abs(program.c.dot(x) + program.b.dot(y));
    rep.complementarity = std::abs(s.dot(y));
    return rep;
}

}  // namespace diamondrec::conic
