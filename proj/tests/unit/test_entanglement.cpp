#include "cqed/entanglement.hpp"
#include "cqed/lindblad.hpp"

#include "support.hpp"

#include <catch_amalgamated.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

using namespace cqed;
using Catch::Matchers::WithinAbs;

namespace {

Matrix4c pure(const Eigen::Vector4cd& psi)
{
    const Eigen::Vector4cd v = psi.normalized();
    return v * v.adjoint();
}

Matrix4c product(const CMatrix& a, const CMatrix& b)
{
    return Eigen::kroneckerProduct(a, b).eval();
}

}  // namespace

TEST_CASE("product states are not entangled")
{
    CHECK(log_negativity(pure(Eigen::Vector4cd(1, 0, 0, 0))) == 0.0);
    for (int k = 0; k < 20; ++k)
        CHECK(log_negativity(product(testing::random_density(2), testing::random_density(2))) < 1e-12);
}

TEST_CASE("Bell state has one ebit")
{
    const Matrix4c bell = pure(Eigen::Vector4cd(0, 1, 1, 0));
    CHECK_THAT(log_negativity(bell), WithinAbs(1.0, 1e-12));
    Eigen::SelfAdjointEigenSolver<Matrix4c> s(partial_transpose_b(bell));
    CHECK_THAT(s.eigenvalues()(0), WithinAbs(-0.5, 1e-12));
    CHECK_THAT(s.eigenvalues()(3), WithinAbs(0.5, 1e-12));
}

TEST_CASE("partial transpose")
{
    const Matrix4c rho = testing::random_density4();
    CHECK(testing::max_abs(partial_transpose_b(partial_transpose_b(rho)) - rho) == 0.0);
    // T_A = (T_B rho)^T.
    CHECK(testing::max_abs(partial_transpose_a(rho) - partial_transpose_b(rho).transpose()) == 0.0);
    CHECK_THAT(log_negativity(rho), WithinAbs(log_negativity(partial_transpose_b(rho)), 1e-12));

    // Element-wise oracle: <a b| rho^T_B |a' b'> = <a b'| rho |a' b>.
    const Matrix4c t = partial_transpose_b(rho);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int ap = 0; ap < 2; ++ap)
                for (int bp = 0; bp < 2; ++bp) CHECK(t(2 * a + b, 2 * ap + bp) == rho(2 * a + bp, 2 * ap + b));

    const CMatrix dynamic = rho;
    CHECK(testing::max_abs(partial_transpose_b(dynamic) - t) == 0.0);
    CHECK_THROWS_AS(partial_transpose_b(CMatrix(CMatrix::Identity(3, 3))), Error);
}

TEST_CASE("separable mixtures have zero negativity")
{
    for (int trial = 0; trial < 20; ++trial) {
        Matrix4c rho = Matrix4c::Zero();
        double total = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double w = testing::uniform(0.0, 1.0);
            rho += w * product(testing::random_density(2), testing::random_density(2));
            total += w;
        }
        CHECK(log_negativity(rho / total) < 1e-12);
    }
}

TEST_CASE("local unitaries leave the negativity unchanged")
{
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix4c rho = testing::random_density4();
        const Matrix4c u = product(testing::random_unitary(2), testing::random_unitary(2));
        CHECK_THAT(log_negativity(u * rho * u.adjoint()), WithinAbs(log_negativity(rho), 1e-9));
    }
}

TEST_CASE("resonant exchange entangles maximally at a quarter period")
{
    const double g = 0.0075;
    CMatrix h = CMatrix::Zero(4, 4);
    h(1, 2) = h(2, 1) = g;
    const double quarter = kPi / (4.0 * g);
    const int steps = 1000;
    const StateSeries s = evolve_master(h, {}, basis_state({"gg", "ge", "eg", "ee"}, "eg"),
                                        TimeGrid{quarter / steps, steps, 2});
    CHECK_THAT(log_negativity(Matrix4c(s.states[1])), WithinAbs(1.0, 1e-9));
    CHECK(log_negativity(Matrix4c(s.states[0])) == 0.0);
}
