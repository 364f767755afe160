#pragma once

#include "cqed/common.hpp"

namespace cqed {

/// Partial transpose on the {gg, ge, eg, ee} basis (index 2 i_a + i_b).
Matrix4c partial_transpose_b(const Matrix4c& rho);
Matrix4c partial_transpose_a(const Matrix4c& rho);

/// Dynamic-size overload; throws DimensionMismatch unless 4 x 4.
Matrix4c partial_transpose_b(const CMatrix& rho);

/// log2 of the trace norm of the partial transpose; values within 1e-10 below
/// zero are clamped to 0.
double log_negativity(const Matrix4c& rho);

}  // namespace cqed
