#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "diamondrec/choi.hpp"
#include "diamondrec/linalg.hpp"
#include "diamondrec/random.hpp"

namespace diamondrec::conic {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class ConeKind { Zero, NonNeg, Soc, Psd };

/// One block of constraint rows. `dim` is the row count for Zero/NonNeg/Soc
/// and the matrix order n for Psd (which then spans n(n+1)/2 rows).
struct ConeSegment {
    ConeKind kind;
    Index dim;

    Index rows() const noexcept { return kind == ConeKind::Psd ? dim * (dim + 1) / 2 : dim; }
};

/// minimize c^T x + offset  subject to  A x + s = b,  s in K.
///
/// Rows of A are grouped by cone segment in the order of `cones`. A Psd
/// segment holds the lower triangle of a symmetric matrix, column by column,
/// with off-diagonal entries scaled by sqrt(2).
struct ConicProgram {
    RealVector c;
    SparseMatrix A;
    RealVector b;
    std::vector<ConeSegment> cones;
    double objective_offset = 0.0;

    Index num_vars() const noexcept { return c.size(); }
    Index num_rows() const noexcept { return b.size(); }

    /// Throws ShapeError when the segment lengths do not match A and b.
    void validate() const;
};

enum class SolveStatus { Optimal, MaxIters, InfeasibleSuspected };

std::string to_string(SolveStatus s);

struct Residuals {
    double primal = 0.0;  // ||Ax + s - b||_inf relative
    double dual = 0.0;    // ||A^T y + c||_inf relative
    double gap = 0.0;     // |c^T x + b^T y| relative

    double max() const noexcept;
};

struct SolverOptions {
    double tol = 1e-8;
    long max_iters = 50000;
    bool scaling = true;
    double relaxation = 1.5;
    int anderson_memory = 20;
    int check_every = 10;
};

struct SolverResult {
    SolveStatus status = SolveStatus::MaxIters;
    double primal_value = 0.0;  // c^T x + offset
    double dual_value = 0.0;    // -b^T y + offset
    RealVector x;
    RealVector y;
    RealVector s;
    Residuals residuals;
    long iterations = 0;
};

/// Operator splitting (ADMM) on the homogeneous self-dual embedding with
/// Ruiz equilibration, over-relaxation and safeguarded Anderson
/// acceleration. Deterministic: the same program and options give a
/// bitwise-identical result.
///
/// Throws NumericError if the iterates become non-finite.
SolverResult solve(const ConicProgram& program, const SolverOptions& opts = {});

/// Euclidean projection onto one cone segment (or its dual when `dual`).
void project_cone(const ConeSegment& cone, Eigen::Ref<RealVector> v, bool dual = false);

/// Lower-triangle scaled packing of a symmetric matrix, and its inverse.
RealVector svec(const RealMatrix& S);
RealMatrix smat(const Eigen::Ref<const RealVector>& v, Index n);

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian H.
/// Throws PreconditionError when H is not Hermitian within tol.
RealMatrix embed_complex(const ComplexMatrix& H, double tol = 1e-10);

/// Adjoint of embed_complex: the Hermitian Omega with
/// <W, embed(H)> = <Omega, H> for all Hermitian H.
ComplexMatrix embed_adjoint(const RealMatrix& W);

// ---------------------------------------------------------------------------
// Program assembly.

/// Sparse affine form a^T x + constant over the builder's variables.
struct Affine {
    std::vector<std::pair<Index, double>> terms;
    double constant = 0.0;

    Affine() = default;
    Affine(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
    static Affine var(Index i, double coef = 1.0) {
        Affine a;
        a.terms.emplace_back(i, coef);
        return a;
    }

    Affine& operator+=(const Affine& o);
    Affine& operator-=(const Affine& o);
    Affine& operator*=(double s);
    friend Affine operator+(Affine a, const Affine& b) { return a += b; }
    friend Affine operator-(Affine a, const Affine& b) { return a -= b; }
    friend Affine operator*(double s, Affine a) { return a *= s; }
    Affine operator-() const { return -1.0 * (*this); }

    double evaluate(const RealVector& x) const;
};

/// Complex scalar with affine real and imaginary parts.
struct ComplexAffine {
    Affine re;
    Affine im;

    ComplexAffine() = default;
    ComplexAffine(Affine r, Affine i) : re(std::move(r)), im(std::move(i)) {}
    ComplexAffine(Complex c) : re(c.real()), im(c.imag()) {}  // NOLINT(google-explicit-constructor)

    ComplexAffine conj() const { return {re, -im}; }
    ComplexAffine& operator+=(const ComplexAffine& o);
    friend ComplexAffine operator+(ComplexAffine a, const ComplexAffine& b) { return a += b; }
    friend ComplexAffine operator-(const ComplexAffine& a, const ComplexAffine& b) {
        return {a.re - b.re, a.im - b.im};
    }
    /// Multiplication by a complex constant.
    friend ComplexAffine operator*(Complex s, const ComplexAffine& a);

    Complex evaluate(const RealVector& x) const { return {re.evaluate(x), im.evaluate(x)}; }
};

/// Dense matrix of complex affine entries.
class AffineMatrix {
public:
    AffineMatrix() = default;
    AffineMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

    static AffineMatrix constant(const ComplexMatrix& M);
    static AffineMatrix zero(Index rows, Index cols) { return AffineMatrix(rows, cols); }

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    ComplexAffine& operator()(Index i, Index j) { return e_[i * cols_ + j]; }
    const ComplexAffine& operator()(Index i, Index j) const { return e_[i * cols_ + j]; }

    AffineMatrix adjoint() const;
    AffineMatrix operator-() const;
    AffineMatrix operator+(const AffineMatrix& o) const;
    AffineMatrix operator-(const AffineMatrix& o) const;
    AffineMatrix scaled(double s) const;

    /// [[tl, tr], [bl, br]].
    static AffineMatrix blocks(const AffineMatrix& tl, const AffineMatrix& tr, const AffineMatrix& bl,
                               const AffineMatrix& br);

    AffineMatrix partial_trace_first(Index dimW, Index dimV) const;
    ComplexAffine trace() const;
    /// Tr(G * this) for a constant G.
    ComplexAffine trace_with(const ComplexMatrix& G) const;

    ComplexMatrix evaluate(const RealVector& x) const;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<ComplexAffine> e_;
};

/// Handle to a block of constraint rows inside the built program.
struct ConstraintRef {
    std::size_t index = 0;
};

/// Collects variables, constraints and an objective, then emits a
/// ConicProgram with rows grouped by cone.
class ProgramBuilder {
public:
    Index add_scalar();
    /// General matrix variable; imaginary parts exist only for Field::Complex.
    AffineMatrix add_matrix(Index rows, Index cols, Field field);
    /// Hermitian (Field::Complex) or real symmetric (Field::Real) variable.
    AffineMatrix add_hermitian(Index n, Field field);

    Index num_vars() const noexcept { return num_vars_; }

    void minimize(const Affine& objective) { objective_ = objective; }

    ConstraintRef add_equality(const std::vector<Affine>& exprs);
    ConstraintRef add_nonneg(const std::vector<Affine>& exprs);
    /// ||v||_2 <= t.
    ConstraintRef add_soc(const Affine& t, const std::vector<Affine>& v);
    /// H >= 0 for an affine matrix with Hermitian structure. Complex fields
    /// ride on the real embedding of order 2n.
    ConstraintRef add_psd(const AffineMatrix& H, Field field);

    ConicProgram build() const;

    /// Rows of the built program owned by a constraint, as [first, first+count).
    std::pair<Index, Index> rows_of(ConstraintRef ref) const;

    /// Multiplier of a PSD constraint mapped back to the constraint's own
    /// space (Hermitian matrix for complex fields).
    ComplexMatrix psd_multiplier(ConstraintRef ref, const RealVector& y) const;
    RealVector multiplier(ConstraintRef ref, const RealVector& y) const;

private:
    struct Block {
        ConeKind kind;
        Index cone_dim;
        Field field = Field::Real;
        Index matrix_order = 0;
        std::vector<Affine> rows;  // s_r = rows[r](x)
    };

    std::vector<std::size_t> emission_order() const;

    Index num_vars_ = 0;
    Affine objective_;
    std::vector<Block> blocks_;
};

/// Text dump: header line "n m", then "c i v", "A r j v", "b r v" triplets
/// and one "cone <kind> <dim>" line per segment.
void write_triplets(const ConicProgram& program, std::ostream& os);

// ---------------------------------------------------------------------------
// Standard-form SDPs: maximize Tr(CZ) s.t. Xi(Z) = D, Z >= 0.

/// Coordinates of a Hermitian n x n matrix in the orthonormal basis
/// {E_ii, (E_ij+E_ji)/sqrt2, i(E_ij-E_ji)/sqrt2}; the map is an isometry.
RealVector hermitian_coords(const ComplexMatrix& H);
ComplexMatrix from_hermitian_coords(const Eigen::Ref<const RealVector>& v, Index n);

struct StandardSdp {
    ComplexMatrix C;  // Hermitian, order n_in
    ComplexMatrix D;  // Hermitian, order n_out
    RealMatrix xi;    // n_out^2 x n_in^2, acting on Hermitian coordinates

    Index n_in() const noexcept { return C.rows(); }
    Index n_out() const noexcept { return D.rows(); }
    ComplexMatrix apply_xi(const ComplexMatrix& Z) const;
    ComplexMatrix apply_xi_adjoint(const ComplexMatrix& Y) const;
};

/// Probes `xi` on the Hermitian basis. Throws PreconditionError when xi is
/// not Hermiticity preserving or C, D are not Hermitian.
StandardSdp build_standard_sdp(const ComplexMatrix& C, const ComplexMatrix& D, const LinearMap& xi);

/// Conic form: minimize -Tr(CZ) with equality rows for Xi(Z) = D and one
/// PSD segment for Z. Identically zero rows with zero right-hand side are
/// dropped.
ConicProgram to_conic(const StandardSdp& sdp);

struct StandardSdpSolution {
    ComplexMatrix Z;
    ComplexMatrix Y;
    double primal_value = 0.0;  // Tr(CZ)
    double dual_value = 0.0;    // Tr(DY)
    SolverResult raw;
};

StandardSdpSolution solve_standard_sdp(const StandardSdp& sdp, const SolverOptions& opts = {});

struct KktReport {
    double primal_feasibility = 0.0;  // ||Xi(Z) - D||_F
    double primal_cone = 0.0;         // max(0, -lambda_min(Z))
    double dual_feasibility = 0.0;    // max(0, -lambda_min(Xi^dagger(Y) - C))
    double gap = 0.0;                 // |Tr(CZ) - Tr(DY)|
    double slackness = 0.0;           // ||Xi^dagger(Y) Z - C Z||_F
    double primal_value = 0.0;
    double dual_value = 0.0;

    double max_residual() const noexcept;
    bool ok(double tol) const noexcept { return max_residual() <= tol; }
};

/// Checks a candidate primal/dual pair without solving anything.
KktReport verify_kkt(const StandardSdp& sdp, const ComplexMatrix& Z, const ComplexMatrix& Y);

struct ConicKktReport {
    double primal_residual = 0.0;   // ||Ax + s - b||_inf with s = Pi_K(b - Ax)
    double primal_cone = 0.0;       // ||(b - Ax) - Pi_K(b - Ax)||_2
    double dual_residual = 0.0;     // ||A^T y + c||_inf
    double dual_cone = 0.0;         // ||y - Pi_K*(y)||_2
    double gap = 0.0;               // |c^T x + b^T y|
    double complementarity = 0.0;   // |s^T y|

    double max_residual() const noexcept;
    bool ok(double tol) const noexcept { return max_residual() <= tol; }
};

ConicKktReport verify_kkt(const ConicProgram& program, const RealVector& x, const RealVector& y);

}  // namespace diamondrec::conic
