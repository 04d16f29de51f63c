#include "diamondrec/choi.hpp"

#include <sstream>

#include <Eigen/QR>

#include "diamondrec/errors.hpp"

namespace diamondrec {

namespace {

ComplexMatrix unit(Index n, Index i, Index j) {
    ComplexMatrix E = ComplexMatrix::Zero(n, n);
    E(i, j) = 1.0;
    return E;
}

// Q factor of a Gaussian matrix, columns rephased so that R has a positive
// diagonal. That makes the distribution of Q invariant (Haar).
ComplexMatrix haar_columns(Index rows, Index cols, Field field, Rng& rng) {
    const ComplexMatrix G = gaussian_matrix(rows, cols, field, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(G);
    ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(rows, cols);
    const ComplexMatrix R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    for (Index j = 0; j < cols; ++j) {
        const double a = std::abs(R(j, j));
        if (a > 0.0) Q.col(j) *= R(j, j) / a;
    }
    return Q;
}

}  // namespace

OperatorMap choi_of_apply(const LinearMap& apply, Index dimV, Index dimW) {
    if (dimV < 1 || dimW < 1) throw ShapeError("choi_of_apply: dimensions must be >= 1");
    ComplexMatrix J = ComplexMatrix::Zero(dimW * dimV, dimW * dimV);
    for (Index i = 0; i < dimV; ++i)
        for (Index j = 0; j < dimV; ++j) {
            const ComplexMatrix out = apply(unit(dimV, i, j));
            if (out.rows() != dimW || out.cols() != dimW) {
                std::ostringstream os;
                os << "choi_of_apply: map returned " << out.rows() << "x" << out.cols() << ", expected "
                   << dimW << "x" << dimW;
                throw ShapeError(os.str());
            }
            // M(E_ij) (x) E_ij: entry ((w, i), (w', j)) = M(E_ij)(w, w').
            for (Index w = 0; w < dimW; ++w)
                for (Index wp = 0; wp < dimW; ++wp) J(w * dimV + i, wp * dimV + j) = out(w, wp);
        }
    OperatorMap M(BipartiteOperator(std::move(J), dimW, dimV));

    // Linearity spot check on a fixed pseudo-random combination.
    Rng rng(0x5eedULL + static_cast<std::uint64_t>(dimV * 131 + dimW));
    const ComplexMatrix probe = gaussian_matrix(dimV, dimV, Field::Complex, rng);
    const ComplexMatrix direct = apply(probe);
    const ComplexMatrix via_choi = apply_map(M, probe);
    if ((direct - via_choi).norm() > 1e-8 * std::max(1.0, direct.norm()))
        throw PreconditionError("choi_of_apply: map failed the linearity spot check");
    return M;
}

ComplexMatrix apply_map(const OperatorMap& M, const ComplexMatrix& rho) {
    const Index dV = M.dimV();
    const Index dW = M.dimW();
    if (rho.rows() != dV || rho.cols() != dV) {
        std::ostringstream os;
        os << "apply_map: input is " << rho.rows() << "x" << rho.cols() << ", map expects " << dV << "x" << dV;
        throw ShapeError(os.str());
    }
    const ComplexMatrix& J = M.choi().mat();
    ComplexMatrix out = ComplexMatrix::Zero(dW, dW);
    for (Index w = 0; w < dW; ++w)
        for (Index wp = 0; wp < dW; ++wp)
            out(w, wp) = (rho.array() * J.block(w * dV, wp * dV, dV, dV).array()).sum();
    return out;
}

OperatorMap kraus_to_choi(const KrausSet& kraus) {
    if (kraus.operators.empty()) throw ShapeError("kraus_to_choi: empty Kraus set");
    const Index dW = kraus.operators.front().rows();
    const Index dV = kraus.operators.front().cols();
    ComplexMatrix J = ComplexMatrix::Zero(dW * dV, dW * dV);
    for (const auto& K : kraus.operators) {
        if (K.rows() != dW || K.cols() != dV) throw ShapeError("kraus_to_choi: inconsistent Kraus operator shapes");
        const ComplexVector v = vec(K);
        J += v * v.adjoint();
    }
    return OperatorMap(BipartiteOperator(std::move(J), dW, dV));
}

OperatorMap sandwich_map(const ComplexMatrix& left, const ComplexMatrix& right) {
    if (left.cols() != right.rows() || left.rows() != right.cols())
        throw ShapeError("sandwich_map: expected left dimW x dimV and right dimV x dimW");
    // J = sum_ij (left e_i)(right^T e_j)^T (x) e_i e_j^T = vec(left) vec(right^T)^T.
    const ComplexVector x = vec(left);
    const ComplexVector y = vec(right.transpose());
    return OperatorMap(BipartiteOperator(x * y.transpose(), left.rows(), left.cols()));
}

CptStatus is_cpt(const OperatorMap& M, double tol) {
    const ComplexMatrix& J = M.choi().mat();
    CptStatus s;
    s.hermiticity_defect = (J - J.adjoint()).norm();
    s.min_eigenvalue = hermitian_eig(J).values.minCoeff();
    s.tp_defect = (partial_trace_first(M.choi()) - ComplexMatrix::Identity(M.dimV(), M.dimV())).norm();
    s.cp = s.hermiticity_defect <= tol && s.min_eigenvalue >= -tol;
    s.tp = s.tp_defect <= tol;
    return s;
}

std::string to_string(UnitaryGroup g) { return g == UnitaryGroup::Orthogonal ? "orthogonal" : "unitary"; }

UnitaryGroup unitary_group_from_string(const std::string& s) {
    if (s == "orthogonal") return UnitaryGroup::Orthogonal;
    if (s == "unitary") return UnitaryGroup::Unitary;
    throw PreconditionError("unknown unitary group '" + s + "'");
}

ComplexMatrix random_unitary(Index n, Rng& rng, UnitaryGroup group) {
    if (n < 1) throw ShapeError("random_unitary: n must be >= 1");
    return haar_columns(n, n, group == UnitaryGroup::Unitary ? Field::Complex : Field::Real, rng);
}

KrausSet random_kraus(Index dimV, Index dimW, Index r, Rng& rng) {
    if (dimV < 1 || dimW < 1 || r < 1) throw ShapeError("random_kraus: dimensions and rank must be >= 1");
    if (r * dimW < dimV) {
        std::ostringstream os;
        os << "random_kraus: no isometry from dimension " << dimV << " into " << dimW << " x " << r;
        throw PreconditionError(os.str());
    }
    const ComplexMatrix iso = haar_columns(dimW * r, dimV, Field::Complex, rng);
    KrausSet out;
    for (Index j = 0; j < r; ++j) out.operators.push_back(iso.middleRows(j * dimW, dimW));
    return out;
}

OperatorMap random_channel(Index dimV, Index dimW, Index r, Rng& rng) {
    return kraus_to_choi(random_kraus(dimV, dimW, r, rng));
}

}  // namespace diamondrec
