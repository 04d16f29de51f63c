#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "diamondrec/choi.hpp"
#include "diamondrec/linalg.hpp"
#include "diamondrec/random.hpp"

namespace diamondrec {

enum class EnsembleKind { GaussianReal, GaussianComplex, RankOneGaussian, StructuredUdv, ProcessTomo, Deconv };

std::string to_string(EnsembleKind k);
EnsembleKind ensemble_kind_from_string(const std::string& s);

/// Everything needed to re-materialise an ensemble bit for bit.
struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::GaussianComplex;
    Index m = 1;
    Index dimW = 2;
    Index dimV = 2;
    std::uint64_t seed = 0;
    UnitaryGroup group = UnitaryGroup::Unitary;  // structured_udv, process_tomo
    Index deconv_length = 0;                     // L for deconv; 0 selects dimV^2
};

struct StructuredTerm {
    ComplexVector x;
    ComplexVector y;
    ComplexMatrix A;  // U D V
};

struct ProcessTerm {
    ComplexVector psi;
    ComplexMatrix A;  // U D U^dagger
};

struct DeconvData {
    Index N = 0;
    Index L = 0;
    Index Q = 0;
    ComplexMatrix B;  // L x N
    ComplexMatrix C;  // L x N
    std::vector<RealVector> h;
    std::vector<RealVector> mvec;
    std::vector<std::pair<Index, Index>> index;  // (l, q) of each functional
};

/// Linear functionals X -> Tr(A_i X) on W (x) V, plus the factored data they
/// were built from.
struct MeasurementEnsemble {
    EnsembleSpec spec;
    std::vector<ComplexMatrix> functionals;
    std::vector<StructuredTerm> structured;
    std::vector<ProcessTerm> process;
    std::optional<DeconvData> deconv;

    Index m() const noexcept { return static_cast<Index>(functionals.size()); }
    Index dimW() const noexcept { return spec.dimW; }
    Index dimV() const noexcept { return spec.dimV; }
    /// True when every functional has zero imaginary part.
    bool is_real() const;
};

/// (2/n)(1, -1, 2, -2, ..., n/2, -n/2). Throws PreconditionError for odd n.
RealVector diagonal_d(Index n);

MeasurementEnsemble gaussian_ensemble(Index m, Index dimW, Index dimV, Field field, Rng& rng);
MeasurementEnsemble rank_one_gaussian_ensemble(Index m, Index dimW, Index dimV, Rng& rng);
/// Tr(A_j M(x_j y_j^dagger)) with A_j = U_j D V_j; n = dimV = dimW must be even.
/// The orthogonal group also draws x_j, y_j from the real sphere.
MeasurementEnsemble structured_ensemble(Index m, Index n, Rng& rng, UnitaryGroup group = UnitaryGroup::Unitary);
/// Tr(A_j M(psi_j psi_j^dagger)) with A_j = U_j D U_j^dagger Hermitian on W.
MeasurementEnsemble process_tomo_ensemble(Index m, Index dimW, Index dimV, Rng& rng);
/// Tr(E_l M(rho_q)) with E_l = c_l^T b_l built from the rows of F B and F C,
/// rho_q = h_q m_q^T. Functionals are ordered q-major, m = L Q.
MeasurementEnsemble deconv_ensemble(Index N, Index L, Index Q, Rng& rng);

/// Materialises an ensemble from its spec using Rng(spec.seed).
MeasurementEnsemble materialize(const EnsembleSpec& spec);

/// Keeps the first m functionals (and matching factored terms).
MeasurementEnsemble truncate(const MeasurementEnsemble& e, Index m);

/// Unitary DFT matrix F_jk = exp(2 pi i jk / L) / sqrt(L).
ComplexMatrix dft_matrix(Index L);

/// (w * x)_i = sum_j w_j x_{(i - j) mod L}.
ComplexVector circular_convolution(const ComplexVector& w, const ComplexVector& x);

/// y_i = Tr(A_i X).
ComplexVector apply_measurement(const MeasurementEnsemble& e, const BipartiteOperator& X);
ComplexVector apply_measurement(const MeasurementEnsemble& e, const OperatorMap& M);

/// Evaluates the ensemble through its factored form (maps applied to the
/// prepared inputs) rather than through the Choi-coordinate functionals.
ComplexVector apply_factored(const MeasurementEnsemble& e, const OperatorMap& M);

/// sum_i v_i A_i^dagger, the adjoint of apply_measurement.
ComplexMatrix adjoint_measurement(const MeasurementEnsemble& e, const ComplexVector& v);

struct NoisyOutcome {
    ComplexVector y;
    double eps_norm = 0.0;
};

/// Adds noise of Euclidean norm exactly eta in a Gaussian direction.
NoisyOutcome add_noise(const ComplexVector& y, double eta, Rng& rng, Field field = Field::Complex);

}  // namespace diamondrec
