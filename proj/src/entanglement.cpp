#include "cqed/entanglement.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace cqed {

Matrix4c partial_transpose_b(const Matrix4c& rho)
{
    Matrix4c out;
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib)
            for (int ja = 0; ja < 2; ++ja)
                for (int jb = 0; jb < 2; ++jb) out(2 * ia + ib, 2 * ja + jb) = rho(2 * ia + jb, 2 * ja + ib);
    return out;
}

Matrix4c partial_transpose_a(const Matrix4c& rho)
{
    Matrix4c out;
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib)
            for (int ja = 0; ja < 2; ++ja)
                for (int jb = 0; jb < 2; ++jb) out(2 * ia + ib, 2 * ja + jb) = rho(2 * ja + ib, 2 * ia + jb);
    return out;
}

Matrix4c partial_transpose_b(const CMatrix& rho)
{
    require(rho.rows() == 4 && rho.cols() == 4, ErrorKind::DimensionMismatch,
            "partial_transpose_b: expected a 4x4 two-qubit state");
    return partial_transpose_b(Matrix4c(rho));
}

double log_negativity(const Matrix4c& rho)
{
    const Matrix4c pt = partial_transpose_b(rho);
    const Matrix4c sym = 0.5 * (pt + pt.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(sym, Eigen::EigenvaluesOnly);
    const double norm = solver.eigenvalues().cwiseAbs().sum();
    const double en = std::log2(norm);
    if (en < 0.0 && en > -1e-10) return 0.0;
    return en;
}

}  // namespace cqed
