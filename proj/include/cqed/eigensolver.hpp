#pragma once

#include "cqed/common.hpp"

namespace cqed {

/// Complex Schur form A = Q T Q^H with T upper triangular and Q unitary.
struct SchurForm {
    CMatrix q;
    CMatrix t;
};

/// Reduce a general complex matrix to upper Hessenberg form with Householder
/// reflections. Returns (Q, H) with A = Q H Q^H.
SchurForm hessenberg(const CMatrix& a);

/// Complex Schur decomposition by single-shift QR iteration on the Hessenberg
/// form (Wilkinson shifts with periodic exceptional shifts).
/// Throws Error(EigFailure) if an eigenvalue fails to deflate.
SchurForm complex_schur(const CMatrix& a, int max_iterations_per_eigenvalue = 60);

/// Eigenvalues and right eigenvectors of a general complex matrix.
///
/// Eigenvectors come from back substitution on the triangular Schur factor;
/// for (near-)repeated eigenvalues vanishing denominators are replaced by a
/// small floor, which keeps the eigenvector matrix invertible. Columns are
/// normalized to unit 2-norm with the largest-magnitude entry real positive.
struct EigenPairs {
    CVector values;
    CMatrix vectors;
};

EigenPairs eigen_decompose(const CMatrix& a);

/// 2-norm condition number sigma_max / sigma_min.
double condition_number(const CMatrix& a);

}  // namespace cqed
