#include <algorithm>
#include <cmath>
#include <ostream>

#include "diamondrec/conic.hpp"
#include "diamondrec/errors.hpp"

namespace diamondrec::conic {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;

int cone_rank(ConeKind k) {
    switch (k) {
        case ConeKind::Zero: return 0;
        case ConeKind::NonNeg: return 1;
        case ConeKind::Soc: return 2;
        case ConeKind::Psd: return 3;
    }
    return 4;
}

const char* cone_name(ConeKind k) {
    switch (k) {
        case ConeKind::Zero: return "zero";
        case ConeKind::NonNeg: return "nonneg";
        case ConeKind::Soc: return "soc";
        case ConeKind::Psd: return "psd";
    }
    return "?";
}
}  // namespace

// --- Affine ---------------------------------------------------------------

Affine& Affine::operator+=(const Affine& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
}

Affine& Affine::operator-=(const Affine& o) {
    for (const auto& [i, v] : o.terms) terms.emplace_back(i, -v);
    constant -= o.constant;
    return *this;
}

Affine& Affine::operator*=(double s) {
    for (auto& t : terms) t.second *= s;
    constant *= s;
    return *this;
}

double Affine::evaluate(const RealVector& x) const {
    double v = constant;
    for (const auto& [i, a] : terms) v += a * x(i);
    return v;
}

ComplexAffine& ComplexAffine::operator+=(const ComplexAffine& o) {
    re += o.re;
    im += o.im;
    return *this;
}

ComplexAffine operator*(Complex s, const ComplexAffine& a) {
    // (sr + i si)(ar + i ai) = (sr ar - si ai) + i (sr ai + si ar)
    ComplexAffine out;
    if (s.real() != 0.0) {
        out.re += s.real() * a.re;
        out.im += s.real() * a.im;
    }
    if (s.imag() != 0.0) {
        out.re -= s.imag() * a.im;
        out.im += s.imag() * a.re;
    }
    return out;
}

// --- AffineMatrix -----------------------------------------------------------

AffineMatrix AffineMatrix::constant(const ComplexMatrix& M) {
    AffineMatrix out(M.rows(), M.cols());
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j) out(i, j) = ComplexAffine(M(i, j));
    return out;
}

AffineMatrix AffineMatrix::adjoint() const {
    AffineMatrix out(cols_, rows_);
    for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j).conj();
    return out;
}

AffineMatrix AffineMatrix::operator-() const { return scaled(-1.0); }

AffineMatrix AffineMatrix::scaled(double s) const {
    AffineMatrix out = *this;
    for (auto& e : out.e_) {
        e.re *= s;
        e.im *= s;
    }
    return out;
}

AffineMatrix AffineMatrix::operator+(const AffineMatrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw ShapeError("AffineMatrix: shape mismatch in +");
    AffineMatrix out = *this;
    for (std::size_t k = 0; k < e_.size(); ++k) out.e_[k] += o.e_[k];
    return out;
}

AffineMatrix AffineMatrix::operator-(const AffineMatrix& o) const { return *this + (-o); }

AffineMatrix AffineMatrix::blocks(const AffineMatrix& tl, const AffineMatrix& tr, const AffineMatrix& bl,
                                  const AffineMatrix& br) {
    if (tl.rows_ != tr.rows_ || bl.rows_ != br.rows_ || tl.cols_ != bl.cols_ || tr.cols_ != br.cols_)
        throw ShapeError("AffineMatrix::blocks: inconsistent block shapes");
    AffineMatrix out(tl.rows_ + bl.rows_, tl.cols_ + tr.cols_);
    auto put = [&out](const AffineMatrix& m, Index r0, Index c0) {
        for (Index i = 0; i < m.rows_; ++i)
            for (Index j = 0; j < m.cols_; ++j) out(r0 + i, c0 + j) = m(i, j);
    };
    put(tl, 0, 0);
    put(tr, 0, tl.cols_);
    put(bl, tl.rows_, 0);
    put(br, tl.rows_, tl.cols_);
    return out;
}

AffineMatrix AffineMatrix::partial_trace_first(Index dimW, Index dimV) const {
    if (rows_ != dimW * dimV || cols_ != dimW * dimV) throw ShapeError("AffineMatrix::partial_trace_first: bad split");
    AffineMatrix out(dimV, dimV);
    for (Index w = 0; w < dimW; ++w)
        for (Index a = 0; a < dimV; ++a)
            for (Index b = 0; b < dimV; ++b) out(a, b) += (*this)(w * dimV + a, w * dimV + b);
    return out;
}

ComplexAffine AffineMatrix::trace() const {
    ComplexAffine t;
    for (Index i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

ComplexAffine AffineMatrix::trace_with(const ComplexMatrix& G) const {
    if (G.rows() != cols_ || G.cols() != rows_) throw ShapeError("AffineMatrix::trace_with: shape mismatch");
    // Tr(G X) = sum_ij G(j, i) X(i, j)
    ComplexAffine t;
    for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j)
            if (G(j, i) != Complex(0.0, 0.0)) t += G(j, i) * (*this)(i, j);
    return t;
}

ComplexMatrix AffineMatrix::evaluate(const RealVector& x) const {
    ComplexMatrix out(rows_, cols_);
    for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).evaluate(x);
    return out;
}

// --- ProgramBuilder -----------------------------------------------------------

Index ProgramBuilder::add_scalar() { return num_vars_++; }

AffineMatrix ProgramBuilder::add_matrix(Index rows, Index cols, Field field) {
    AffineMatrix out(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            out(i, j).re = Affine::var(add_scalar());
            if (field == Field::Complex) out(i, j).im = Affine::var(add_scalar());
        }
    return out;
}

AffineMatrix ProgramBuilder::add_hermitian(Index n, Field field) {
    AffineMatrix out(n, n);
    for (Index i = 0; i < n; ++i) {
        out(i, i).re = Affine::var(add_scalar());
        for (Index j = i + 1; j < n; ++j) {
            const Index re = add_scalar();
            out(i, j).re = Affine::var(re);
            out(j, i).re = Affine::var(re);
            if (field == Field::Complex) {
                const Index im = add_scalar();
                out(i, j).im = Affine::var(im);
                out(j, i).im = Affine::var(im, -1.0);
            }
        }
    }
    return out;
}

ConstraintRef ProgramBuilder::add_equality(const std::vector<Affine>& exprs) {
    blocks_.push_back({ConeKind::Zero, static_cast<Index>(exprs.size()), Field::Real, 0, exprs});
    return {blocks_.size() - 1};
}

ConstraintRef ProgramBuilder::add_nonneg(const std::vector<Affine>& exprs) {
    blocks_.push_back({ConeKind::NonNeg, static_cast<Index>(exprs.size()), Field::Real, 0, exprs});
    return {blocks_.size() - 1};
}

ConstraintRef ProgramBuilder::add_soc(const Affine& t, const std::vector<Affine>& v) {
    std::vector<Affine> rows;
    rows.reserve(v.size() + 1);
    rows.push_back(t);
    rows.insert(rows.end(), v.begin(), v.end());
    blocks_.push_back({ConeKind::Soc, static_cast<Index>(rows.size()), Field::Real, 0, std::move(rows)});
    return {blocks_.size() - 1};
}

ConstraintRef ProgramBuilder::add_psd(const AffineMatrix& H, Field field) {
    if (H.rows() != H.cols()) throw ShapeError("add_psd: matrix must be square");
    const Index n = H.rows();
    const Index order = field == Field::Complex ? 2 * n : n;
    // Entry (i, j) of the (embedded) symmetric matrix as an affine form.
    auto entry = [&](Index i, Index j) -> Affine {
        if (field == Field::Real) return H(i, j).re;
        const Index bi = i / n, bj = j / n, a = i % n, b = j % n;
        if (bi == bj) return H(a, b).re;
        if (bi == 1 && bj == 0) return H(a, b).im;
        return -H(a, b).im;
    };
    std::vector<Affine> rows;
    rows.reserve(order * (order + 1) / 2);
    for (Index j = 0; j < order; ++j)
        for (Index i = j; i < order; ++i) {
            Affine e = entry(i, j);
            if (i != j) e *= kSqrt2;
            rows.push_back(std::move(e));
        }
    blocks_.push_back({ConeKind::Psd, order, field, n, std::move(rows)});
    return {blocks_.size() - 1};
}

std::vector<std::size_t> ProgramBuilder::emission_order() const {
    std::vector<std::size_t> order(blocks_.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        return cone_rank(blocks_[a].kind) < cone_rank(blocks_[b].kind);
    });
    return order;
}

ConicProgram ProgramBuilder::build() const {
    ConicProgram p;
    p.c = RealVector::Zero(num_vars_);
    for (const auto& [i, v] : objective_.terms) p.c(i) += v;
    p.objective_offset = objective_.constant;

    Index total = 0;
    for (const auto& blk : blocks_) total += static_cast<Index>(blk.rows.size());
    p.b = RealVector::Zero(total);

    std::vector<Eigen::Triplet<double>> triplets;
    Index row = 0;
    for (std::size_t k : emission_order()) {
        const auto& blk = blocks_[k];
        // Zero and nonneg blocks merge into single segments below.
        for (const auto& e : blk.rows) {
            for (const auto& [j, v] : e.terms) triplets.emplace_back(row, j, -v);
            p.b(row) = e.constant;
            ++row;
        }
        const Index dim = blk.kind == ConeKind::Psd ? blk.cone_dim : static_cast<Index>(blk.rows.size());
        if ((blk.kind == ConeKind::Zero || blk.kind == ConeKind::NonNeg) && !p.cones.empty() &&
            p.cones.back().kind == blk.kind) {
            p.cones.back().dim += dim;
        } else if (dim > 0 || blk.kind == ConeKind::Psd) {
            p.cones.push_back({blk.kind, dim});
        }
    }
    p.A.resize(total, num_vars_);
    p.A.setFromTriplets(triplets.begin(), triplets.end());
    p.A.makeCompressed();
    p.validate();
    return p;
}

std::pair<Index, Index> ProgramBuilder::rows_of(ConstraintRef ref) const {
    Index row = 0;
    for (std::size_t k : emission_order()) {
        const Index count = static_cast<Index>(blocks_[k].rows.size());
        if (k == ref.index) return {row, count};
        row += count;
    }
    throw ShapeError("ProgramBuilder::rows_of: unknown constraint");
}

RealVector ProgramBuilder::multiplier(ConstraintRef ref, const RealVector& y) const {
    const auto [first, count] = rows_of(ref);
    return y.segment(first, count);
}

ComplexMatrix ProgramBuilder::psd_multiplier(ConstraintRef ref, const RealVector& y) const {
    const auto& blk = blocks_.at(ref.index);
    if (blk.kind != ConeKind::Psd) throw ShapeError("psd_multiplier: constraint is not a PSD block");
    const RealMatrix W = smat(multiplier(ref, y), blk.cone_dim);
    if (blk.field == Field::Real) return W.cast<Complex>();
    return embed_adjoint(W);
}

void write_triplets(const ConicProgram& program, std::ostream& os) {
    os.precision(17);
    os << program.num_vars() << ' ' << program.num_rows() << '\n';
    os << "offset " << program.objective_offset << '\n';
    for (Index i = 0; i < program.c.size(); ++i)
        if (program.c(i) != 0.0) os << "c " << i << ' ' << program.c(i) << '\n';
    for (Index k = 0; k < program.A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(program.A, k); it; ++it)
            os << "A " << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    for (Index i = 0; i < program.b.size(); ++i)
        if (program.b(i) != 0.0) os << "b " << i << ' ' << program.b(i) << '\n';
    for (const auto& cone : program.cones) os << "cone " << cone_name(cone.kind) << ' ' << cone.dim << '\n';
}

}  // namespace diamondrec::conic
