#pragma once

#include "diamondrec/conic.hpp"

namespace diamondrec {

enum class Regularizer { Nuclear, Square };

std::string to_string(Regularizer r);
/// Accepts "nuclear" and "square"; throws PreconditionError otherwise.
Regularizer regularizer_from_string(const std::string& s);

/// Handles into a regularizer epigraph added to a ProgramBuilder.
struct RegularizerBlock {
    conic::Affine objective;
    conic::AffineMatrix Y;
    conic::AffineMatrix Z;
    conic::ConstraintRef block;    // [[Y, -X], [-X^dagger, Z]] >= 0
    conic::ConstraintRef t_left;   // t1 1 - Tr_W Y >= 0 (square only)
    conic::ConstraintRef t_right;  // t2 1 - Tr_W Z >= 0 (square only)
};

/// Adds the semidefinite epigraph of the nuclear norm,
///   1/2 (Tr Y + Tr Z),
/// or of the square norm,
///   dimV/2 (||Tr_W Y||_inf + ||Tr_W Z||_inf),
/// of the affine matrix X on W (x) V. The returned objective is to be
/// minimised (possibly together with other terms).
RegularizerBlock add_regularizer(conic::ProgramBuilder& pb, const conic::AffineMatrix& X, Regularizer reg,
                                 Index dimW, Index dimV, Field field);

}  // namespace diamondrec
