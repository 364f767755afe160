#pragma once

#include "cqed/common.hpp"

#include <Eigen/Dense>

#include <random>

namespace testing {

using cqed::cplx;
using cqed::CMatrix;
using cqed::Matrix4c;

inline std::mt19937_64& rng()
{
    static std::mt19937_64 engine(12345);
    return engine;
}

inline double uniform(double lo = 0.0, double hi = 1.0)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline CMatrix random_complex(Eigen::Index n)
{
    std::normal_distribution<double> g;
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng()), g(rng()));
    return m;
}

/// Random full-rank density matrix G G^dag / Tr.
inline CMatrix random_density(Eigen::Index n)
{
    const CMatrix g = random_complex(n);
    CMatrix rho = g * g.adjoint();
    return rho / rho.trace();
}

inline Matrix4c random_density4() { return random_density(4); }

inline CMatrix random_hermitian(Eigen::Index n, double scale = 1.0)
{
    const CMatrix g = random_complex(n);
    return 0.5 * scale * (g + g.adjoint());
}

/// Haar-ish unitary from the QR of a Gaussian matrix.
inline CMatrix random_unitary(Eigen::Index n)
{
    Eigen::HouseholderQR<CMatrix> qr(random_complex(n));
    return qr.householderQ() * CMatrix::Identity(n, n);
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing
