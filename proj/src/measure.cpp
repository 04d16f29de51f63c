#include "diamondrec/measure.hpp"

#include <cmath>
#include <numbers>

#include "diamondrec/errors.hpp"

namespace diamondrec {

namespace {

void require_positive(Index m, const char* what) {
    if (m < 1) throw PreconditionError(std::string(what) + ": m must be >= 1");
}

// Choi-coordinate functional of M -> Tr(A M(rho)): A (x) rho^T.
ComplexMatrix choi_functional(const ComplexMatrix& A, const ComplexMatrix& rho) {
    return kron(A, ComplexMatrix(rho.transpose()));
}

MeasurementEnsemble make(EnsembleKind kind, Index m, Index dimW, Index dimV) {
    MeasurementEnsemble e;
    e.spec.kind = kind;
    e.spec.m = m;
    e.spec.dimW = dimW;
    e.spec.dimV = dimV;
    e.functionals.reserve(static_cast<std::size_t>(m));
    return e;
}

}  // namespace

std::string to_string(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::GaussianReal: return "gaussian_real";
        case EnsembleKind::GaussianComplex: return "gaussian_complex";
        case EnsembleKind::RankOneGaussian: return "rank_one_gaussian";
        case EnsembleKind::StructuredUdv: return "structured_udv";
        case EnsembleKind::ProcessTomo: return "process_tomo";
        case EnsembleKind::Deconv: return "deconv";
    }
    return "unknown";
}

EnsembleKind ensemble_kind_from_string(const std::string& s) {
    for (EnsembleKind k : {EnsembleKind::GaussianReal, EnsembleKind::GaussianComplex, EnsembleKind::RankOneGaussian,
                           EnsembleKind::StructuredUdv, EnsembleKind::ProcessTomo, EnsembleKind::Deconv})
        if (to_string(k) == s) return k;
    throw PreconditionError("unknown ensemble kind '" + s + "'");
}

bool MeasurementEnsemble::is_real() const {
    for (const auto& A : functionals)
        if (A.imag().cwiseAbs().maxCoeff() != 0.0) return false;
    return true;
}

RealVector diagonal_d(Index n) {
    if (n < 2 || n % 2 != 0) throw PreconditionError("diagonal_d: dimension must be even and positive");
    RealVector d(n);
    for (Index k = 0; k < n / 2; ++k) {
        d(2 * k) = 2.0 * static_cast<double>(k + 1) / static_cast<double>(n);
        d(2 * k + 1) = -d(2 * k);
    }
    return d;
}

MeasurementEnsemble gaussian_ensemble(Index m, Index dimW, Index dimV, Field field, Rng& rng) {
    require_positive(m, "gaussian_ensemble");
    MeasurementEnsemble e =
        make(field == Field::Real ? EnsembleKind::GaussianReal : EnsembleKind::GaussianComplex, m, dimW, dimV);
    const Index d = dimW * dimV;
    for (Index i = 0; i < m; ++i) e.functionals.push_back(gaussian_matrix(d, d, field, rng));
    return e;
}

MeasurementEnsemble rank_one_gaussian_ensemble(Index m, Index dimW, Index dimV, Rng& rng) {
    require_positive(m, "rank_one_gaussian_ensemble");
    MeasurementEnsemble e = make(EnsembleKind::RankOneGaussian, m, dimW, dimV);
    const Index d = dimW * dimV;
    for (Index i = 0; i < m; ++i) {
        const ComplexVector a = gaussian_vector(d, Field::Complex, rng);
        e.functionals.push_back(a * a.adjoint());
    }
    return e;
}

MeasurementEnsemble structured_ensemble(Index m, Index n, Rng& rng, UnitaryGroup group) {
    require_positive(m, "structured_ensemble");
    const RealVector d = diagonal_d(n);
    const ComplexMatrix D = d.cast<Complex>().asDiagonal();
    const Field field = group == UnitaryGroup::Unitary ? Field::Complex : Field::Real;
    MeasurementEnsemble e = make(EnsembleKind::StructuredUdv, m, n, n);
    e.spec.group = group;
    for (Index j = 0; j < m; ++j) {
        StructuredTerm t;
        t.x = random_unit_vector(n, field, rng);
        t.y = random_unit_vector(n, field, rng);
        const ComplexMatrix U = random_unitary(n, rng, group);
        const ComplexMatrix V = random_unitary(n, rng, group);
        t.A = U * D * V;
        e.functionals.push_back(choi_functional(t.A, t.x * t.y.adjoint()));
        e.structured.push_back(std::move(t));
    }
    return e;
}

MeasurementEnsemble process_tomo_ensemble(Index m, Index dimW, Index dimV, Rng& rng) {
    require_positive(m, "process_tomo_ensemble");
    RealVector spec(dimW);
    for (Index k = 0; k < dimW; ++k) spec(k) = static_cast<double>(k + 1) / static_cast<double>(dimW);
    const ComplexMatrix D = spec.cast<Complex>().asDiagonal();
    MeasurementEnsemble e = make(EnsembleKind::ProcessTomo, m, dimW, dimV);
    for (Index j = 0; j < m; ++j) {
        ProcessTerm t;
        t.psi = random_unit_vector(dimV, Field::Complex, rng);
        const ComplexMatrix U = random_unitary(dimW, rng, UnitaryGroup::Unitary);
        t.A = U * D * U.adjoint();
        e.functionals.push_back(choi_functional(t.A, t.psi * t.psi.adjoint()));
        e.process.push_back(std::move(t));
    }
    return e;
}

MeasurementEnsemble deconv_ensemble(Index N, Index L, Index Q, Rng& rng) {
    if (N < 1 || L < 1 || Q < 1) throw PreconditionError("deconv_ensemble: N, L and Q must be >= 1");
    MeasurementEnsemble e = make(EnsembleKind::Deconv, L * Q, N, N);
    e.spec.deconv_length = L;
    DeconvData data;
    data.N = N;
    data.L = L;
    data.Q = Q;
    data.B = gaussian_matrix(L, N, Field::Real, rng);
    data.C = gaussian_matrix(L, N, Field::Real, rng);
    for (Index q = 0; q < Q; ++q) {
        data.h.push_back(gaussian_vector(N, Field::Real, rng).real());
        data.mvec.push_back(gaussian_vector(N, Field::Real, rng).real());
    }
    const ComplexMatrix F = dft_matrix(L);
    const ComplexMatrix FB = F * data.B;
    const ComplexMatrix FC = F * data.C;
    for (Index q = 0; q < Q; ++q) {
        const ComplexMatrix rho = data.h[q].cast<Complex>() * data.mvec[q].cast<Complex>().transpose();
        for (Index l = 0; l < L; ++l) {
            const ComplexMatrix E = FC.row(l).transpose() * FB.row(l);
            e.functionals.push_back(choi_functional(E, rho));
            data.index.emplace_back(l, q);
        }
    }
    e.deconv = std::move(data);
    return e;
}

MeasurementEnsemble materialize(const EnsembleSpec& spec) {
    Rng rng(spec.seed);
    MeasurementEnsemble e;
    switch (spec.kind) {
        case EnsembleKind::GaussianReal:
            e = gaussian_ensemble(spec.m, spec.dimW, spec.dimV, Field::Real, rng);
            break;
        case EnsembleKind::GaussianComplex:
            e = gaussian_ensemble(spec.m, spec.dimW, spec.dimV, Field::Complex, rng);
            break;
        case EnsembleKind::RankOneGaussian:
            e = rank_one_gaussian_ensemble(spec.m, spec.dimW, spec.dimV, rng);
            break;
        case EnsembleKind::StructuredUdv:
            if (spec.dimW != spec.dimV) throw ShapeError("structured_udv requires dimW == dimV");
            e = structured_ensemble(spec.m, spec.dimV, rng, spec.group);
            break;
        case EnsembleKind::ProcessTomo:
            e = process_tomo_ensemble(spec.m, spec.dimW, spec.dimV, rng);
            break;
        case EnsembleKind::Deconv: {
            if (spec.dimW != spec.dimV) throw ShapeError("deconv requires dimW == dimV");
            require_positive(spec.m, "deconv");
            const Index L = spec.deconv_length > 0 ? spec.deconv_length : spec.dimV * spec.dimV;
            const Index Q = (spec.m + L - 1) / L;
            e = truncate(deconv_ensemble(spec.dimV, L, Q, rng), spec.m);
            break;
        }
    }
    e.spec = spec;
    return e;
}

MeasurementEnsemble truncate(const MeasurementEnsemble& e, Index m) {
    if (m < 1 || m > e.m()) throw PreconditionError("truncate: m out of range");
    MeasurementEnsemble out = e;
    const auto keep = static_cast<std::size_t>(m);
    out.functionals.resize(keep);
    if (!out.structured.empty()) out.structured.resize(keep);
    if (!out.process.empty()) out.process.resize(keep);
    if (out.deconv) out.deconv->index.resize(keep);
    out.spec.m = m;
    return out;
}

ComplexMatrix dft_matrix(Index L) {
    if (L < 1) throw PreconditionError("dft_matrix: L must be >= 1");
    ComplexMatrix F(L, L);
    const double scale = 1.0 / std::sqrt(static_cast<double>(L));
    for (Index j = 0; j < L; ++j)
        for (Index k = 0; k < L; ++k) {
            // Reduce jk mod L first so the angle stays small.
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * k) % L) / static_cast<double>(L);
            F(j, k) = std::polar(scale, angle);
        }
    return F;
}

ComplexVector circular_convolution(const ComplexVector& w, const ComplexVector& x) {
    if (w.size() != x.size()) throw ShapeError("circular_convolution: lengths differ");
    const Index L = w.size();
    ComplexVector y = ComplexVector::Zero(L);
    for (Index i = 0; i < L; ++i)
        for (Index j = 0; j < L; ++j) y(i) += w(j) * x(((i - j) % L + L) % L);
    return y;
}

ComplexVector apply_measurement(const MeasurementEnsemble& e, const BipartiteOperator& X) {
    if (X.dimW() != e.dimW() || X.dimV() != e.dimV())
        throw ShapeError("apply_measurement: signal dimensions do not match the ensemble");
    ComplexVector y(e.m());
    for (Index i = 0; i < e.m(); ++i)
        y(i) = (e.functionals[static_cast<std::size_t>(i)].transpose().array() * X.mat().array()).sum();
    return y;
}

ComplexVector apply_measurement(const MeasurementEnsemble& e, const OperatorMap& M) {
    return apply_measurement(e, M.choi());
}

ComplexVector apply_factored(const MeasurementEnsemble& e, const OperatorMap& M) {
    if (M.dimW() != e.dimW() || M.dimV() != e.dimV())
        throw ShapeError("apply_factored: map dimensions do not match the ensemble");
    ComplexVector y(e.m());
    for (Index i = 0; i < e.m(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        switch (e.spec.kind) {
            case EnsembleKind::StructuredUdv: {
                const auto& t = e.structured[k];
                y(i) = (t.A * apply_map(M, t.x * t.y.adjoint())).trace();
                break;
            }
            case EnsembleKind::ProcessTomo: {
                const auto& t = e.process[k];
                y(i) = (t.A * apply_map(M, t.psi * t.psi.adjoint())).trace();
                break;
            }
            case EnsembleKind::Deconv: {
                const DeconvData& d = *e.deconv;
                const auto [l, q] = d.index[k];
                const ComplexMatrix F = dft_matrix(d.L);
                const ComplexMatrix E = (F * d.C).row(l).transpose() * (F * d.B).row(l);
                const ComplexMatrix rho = d.h[static_cast<std::size_t>(q)].cast<Complex>() *
                                          d.mvec[static_cast<std::size_t>(q)].cast<Complex>().transpose();
                y(i) = (E * apply_map(M, rho)).trace();
                break;
            }
            default:
                y(i) = (e.functionals[k].transpose().array() * M.choi().mat().array()).sum();
        }
    }
    return y;
}

ComplexMatrix adjoint_measurement(const MeasurementEnsemble& e, const ComplexVector& v) {
    if (v.size() != e.m()) throw ShapeError("adjoint_measurement: vector length differs from m");
    const Index d = e.dimW() * e.dimV();
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (Index i = 0; i < e.m(); ++i) out += v(i) * e.functionals[static_cast<std::size_t>(i)].adjoint();
    return out;
}

NoisyOutcome add_noise(const ComplexVector& y, double eta, Rng& rng, Field field) {
    if (!(eta >= 0.0)) throw PreconditionError("add_noise: eta must be >= 0");
    if (eta == 0.0 || y.size() == 0) return {y, 0.0};
    const ComplexVector dir = random_unit_vector(y.size(), field, rng);
    return {y + eta * dir, eta};
}

}  // namespace diamondrec
