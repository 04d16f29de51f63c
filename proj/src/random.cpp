#include "diamondrec/random.hpp"

namespace diamondrec {

ComplexMatrix gaussian_matrix(Index rows, Index cols, Field field, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix G(rows, cols);
    // Column-major fill order is part of the reproducibility contract.
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = field == Field::Complex ? normal(rng) : 0.0;
            G(i, j) = Complex(re, im);
        }
    return G;
}

ComplexVector gaussian_vector(Index n, Field field, Rng& rng) {
    return gaussian_matrix(n, 1, field, rng).col(0);
}

ComplexVector random_unit_vector(Index n, Field field, Rng& rng) {
    ComplexVector v = gaussian_vector(n, field, rng);
    double norm = v.norm();
    while (norm == 0.0) {
        v = gaussian_vector(n, field, rng);
        norm = v.norm();
    }
    return v / norm;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace diamondrec
