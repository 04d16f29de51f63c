#pragma once

#include <functional>
#include <string>
#include <vector>

#include "diamondrec/linalg.hpp"
#include "diamondrec/random.hpp"

namespace diamondrec {

/// Linear map L(V) -> L(W) stored through its Choi matrix
/// J(M) = sum_ij M(E_ij) (x) E_ij on W (x) V.
class OperatorMap {
public:
    OperatorMap() = default;
    explicit OperatorMap(BipartiteOperator choi) : choi_(std::move(choi)) {}

    const BipartiteOperator& choi() const noexcept { return choi_; }
    Index dimV() const noexcept { return choi_.dimV(); }
    Index dimW() const noexcept { return choi_.dimW(); }

private:
    BipartiteOperator choi_;
};

/// Operators K_j : V -> W with M(rho) = sum_j K_j rho K_j^dagger.
struct KrausSet {
    std::vector<ComplexMatrix> operators;

    Index rank() const noexcept { return static_cast<Index>(operators.size()); }
};

using LinearMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

/// Builds J(M) by evaluating `apply` on every E_ij of L(V). Linearity is
/// spot-checked on one random combination; a failed check throws.
OperatorMap choi_of_apply(const LinearMap& apply, Index dimV, Index dimW);

/// M(rho) = Tr_V[(1_W (x) rho^T) J(M)].
ComplexMatrix apply_map(const OperatorMap& M, const ComplexMatrix& rho);

OperatorMap kraus_to_choi(const KrausSet& kraus);

/// Choi matrix of X -> left * X * right, with left: dimW x dimV and
/// right: dimV x dimW. Rank one: ((left (x) 1) vec 1)((right^dagger (x) 1) vec 1)^dagger.
OperatorMap sandwich_map(const ComplexMatrix& left, const ComplexMatrix& right);

struct CptStatus {
    bool cp = false;
    bool tp = false;
    double min_eigenvalue = 0.0;     // of the Hermitian part of J
    double hermiticity_defect = 0.0; // ||J - J^dagger||_F
    double tp_defect = 0.0;          // ||Tr_W J - 1_V||_F
};

CptStatus is_cpt(const OperatorMap& M, double tol = 1e-9);

enum class UnitaryGroup { Orthogonal, Unitary };

std::string to_string(UnitaryGroup g);
/// Accepts "orthogonal" and "unitary"; throws PreconditionError otherwise.
UnitaryGroup unitary_group_from_string(const std::string& s);

/// Haar-distributed element of O(n) or U(n): QR of a Gaussian matrix with
/// the phases of R's diagonal moved into Q.
ComplexMatrix random_unitary(Index n, Rng& rng, UnitaryGroup group = UnitaryGroup::Unitary);

/// Kraus operators of a random channel of Kraus rank r, sliced from a Haar
/// isometry V -> W (x) C^r. Requires r * dimW >= dimV.
KrausSet random_kraus(Index dimV, Index dimW, Index r, Rng& rng);

OperatorMap random_channel(Index dimV, Index dimW, Index r, Rng& rng);

}  // namespace diamondrec
