#pragma once

#include <vector>

namespace gcme {

struct SymmetricEigenResult {
    std::vector<double> values;   // ascending
    std::vector<double> vectors;  // row-major n x n; column k pairs with values[k]
};

// Full eigendecomposition of a dense symmetric matrix (row-major, size n) by
// Householder reduction to tridiagonal form followed by the implicit-shift QL
// iteration, after the Algol procedures tred2/tql2 of Bowdler, Martin,
// Reinsch and Wilkinson and their EISPACK descendants. Accumulates in
// extended precision so that the small eigenvalues of strongly graded
// matrices keep usable relative accuracy. Throws NoConvergence when an
// off-diagonal entry fails to vanish within the iteration cap.
SymmetricEigenResult symmetric_eigen(const std::vector<double>& matrix, int n,
                                     int max_sweeps = 50);

}  // namespace gcme
