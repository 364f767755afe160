#include "cqed/lindblad.hpp"

#include "support.hpp"

#include <catch_amalgamated.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace cqed;
using Catch::Matchers::WithinAbs;

namespace {

CMatrix lowering2()
{
    CMatrix s = CMatrix::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

CMatrix sigma_x()
{
    CMatrix x = CMatrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    return x;
}

const std::vector<std::string> kQubit{"g", "e"};

}  // namespace

TEST_CASE("dissipator of the lowering operator")
{
    CMatrix rho(2, 2);
    rho << 0.3, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.7;
    const CMatrix d = dissipator(lowering2(), rho);
    CHECK_THAT(d(0, 0).real(), WithinAbs(0.7, 1e-15));
    CHECK_THAT(d(1, 1).real(), WithinAbs(-0.7, 1e-15));
    CHECK(std::abs(d(0, 1) + 0.5 * rho(0, 1)) < 1e-15);
}

TEST_CASE("generator is trace free and Hermiticity preserving")
{
    for (int n : {2, 4, 6}) {
        const CMatrix h = testing::random_hermitian(n);
        std::vector<JumpOperator> jumps;
        for (int k = 0; k < 3; ++k) {
            jumps.push_back({testing::random_complex(n), testing::uniform(0.0, 0.1)});
        }
        const CMatrix rho = testing::random_density(n);
        const CMatrix r = lindblad_rhs(h, jumps, rho);
        CHECK(std::abs(r.trace()) < 1e-13);
        CHECK(testing::max_abs(r - r.adjoint()) < 1e-13);

        const CMatrix l = lindblad_superoperator(h, jumps);
        const CVector v = l * Eigen::Map<const CVector>(rho.data(), n * n);
        CHECK(testing::max_abs(Eigen::Map<const CMatrix>(v.data(), n, n) - r) < 1e-12);
    }
}

TEST_CASE("exponential decay of the excited state")
{
    const double gamma = 0.002;  // per ns
    const TimeGrid grid{0.5, 20, 51};
    const StateSeries s = evolve_master(CMatrix::Zero(2, 2), {{lowering2(), gamma}}, basis_state(kQubit, "e"), grid);
    REQUIRE(s.states.size() == 51);
    for (int k = 0; k < grid.samples; ++k) {
        CHECK_THAT(s.times[k], WithinAbs(grid.time(k), 1e-12));
        CHECK_THAT(s.states[k](1, 1).real(), WithinAbs(std::exp(-gamma * s.times[k]), 1e-6));
    }
}

TEST_CASE("unitary evolution keeps the state pure")
{
    const CMatrix h = testing::random_hermitian(4, 0.1);
    std::vector<std::string> labels{"gg", "ge", "eg", "ee"};
    const StateSeries s = evolve_master(h, {}, basis_state(labels, "eg"), TimeGrid{0.01, 10, 30});
    for (const auto& rho : s.states) {
        CHECK_THAT((rho * rho).trace().real(), WithinAbs(1.0, 1e-9));
        CHECK_THAT(rho.trace().real(), WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("RK4 step error is fourth order")
{
    const CMatrix h = 0.5 * sigma_x();
    const std::vector<JumpOperator> jumps{{lowering2(), 0.3}};
    const double t = 2.0;
    const CMatrix exact_map = (lindblad_superoperator(h, jumps) * t).exp();
    const DensityMatrix rho0 = basis_state(kQubit, "e");
    const CVector exact = exact_map * Eigen::Map<const CVector>(rho0.data.data(), 4);

    auto error = [&](int steps) {
        const StateSeries s = evolve_master(h, jumps, rho0, TimeGrid{t / steps, steps, 2});
        return testing::max_abs(s.states[1] - Eigen::Map<const CMatrix>(exact.data(), 2, 2));
    };
    const double ratio = error(20) / error(40);
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);
}

TEST_CASE("step map matches the RK4 polynomial")
{
    const CMatrix l = lindblad_superoperator(sigma_x(), {{lowering2(), 0.2}});
    const double dt = 0.05;
    const CMatrix hl = dt * l;
    const CMatrix id = CMatrix::Identity(4, 4);
    const CMatrix expected = id + hl + hl * hl / 2.0 + hl * hl * hl / 6.0 + hl * hl * hl * hl / 24.0;
    const CMatrix m = rk4_step_map(l, dt);
    CHECK(testing::max_abs(m - expected) < 1e-15);
    CHECK(testing::max_abs(step_map_power(m, 7) - m * m * m * m * m * m * m) < 1e-13);
    CHECK(testing::max_abs(step_map_power(m, 0) - id) == 0.0);
}

TEST_CASE("rotating frame subtracts omega per excitation")
{
    const CMatrix h = testing::random_hermitian(3);
    CMatrix n = CMatrix::Zero(3, 3);
    n(1, 1) = 1.0;
    n(2, 2) = 2.0;
    const CMatrix r = rotating_frame(h, n, 4.0);
    CHECK(testing::max_abs(r - (h - 4.0 * n)) == 0.0);
}

TEST_CASE("state invariants")
{
    DensityMatrix rho = basis_state(kQubit, "g");
    CHECK_NOTHROW(rho.check(0.0));
    rho.data(0, 0) = 1.1;
    try {
        rho.check(3.0);
        FAIL("expected InvariantViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvariantViolation);
        CHECK(std::string(e.what()).find("trace") != std::string::npos);
    }
    rho.data(0, 0) = 1.0;
    rho.data(0, 1) = 0.3;
    CHECK_THROWS_AS(rho.check(0.0), Error);
    rho.data(1, 0) = 0.3;  // Hermitian but not positive
    CHECK_THROWS_AS(rho.check(0.0), Error);
}

TEST_CASE("labels and CSV export")
{
    CHECK_THROWS_AS(basis_state(kQubit, "f"), Error);
    const StateSeries s = evolve_master(CMatrix::Zero(2, 2), {{lowering2(), 0.1}}, basis_state(kQubit, "e"),
                                        TimeGrid{0.1, 10, 3});
    const std::string csv = populations_and_coherences(s, kQubit, {{"e", "e"}, {"g", "e"}});
    CHECK(csv.find("time") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    try {
        populations_and_coherences(s, kQubit, {{"x", "e"}});
        FAIL("expected UnknownLabel");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownLabel);
    }
}

TEST_CASE("rates and grids are validated")
{
    DecayRates rates;
    rates.gamma_a10 = -1.0;
    CHECK_THROWS_AS(rates.validate(), Error);
    CHECK_THROWS_AS((TimeGrid{0.0, 1, 1}.validate()), Error);
    CHECK_THROWS_AS((TimeGrid{0.1, 1, 0}.validate()), Error);
}
