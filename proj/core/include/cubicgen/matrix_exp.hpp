#pragma once

#include "cubicgen/fock_space.hpp"

namespace cubicgen {

// Matrix exponential by scaling and squaring with diagonal Pade approximants
// of degree 3, 5, 7, 9 or 13. Degree and scaling are selected from the
// 1-norm so that the backward error stays at unit-roundoff level
// (Higham, SIAM J. Matrix Anal. Appl. 26, 2005).
//
// Throws NumericError on non-finite input.
ComplexMatrix matrix_exp(const ComplexMatrix& m);

OperatorMatrix matrix_exp(const OperatorMatrix& m);

}  // namespace cubicgen
