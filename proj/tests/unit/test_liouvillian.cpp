#include "cqed/liouvillian.hpp"

#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace cqed;
using Catch::Matchers::WithinAbs;

namespace {

Matrix4c projector(int k)
{
    Matrix4c p = Matrix4c::Zero();
    p(k, k) = 1.0;
    return p;
}

bool by_re_im(cplx x, cplx y)
{
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
}

/// Largest distance after pairing each expected value with its nearest unused
/// computed one; robust to ordering ties between conjugate pairs.
double match_error(std::vector<cplx> computed, const std::vector<cplx>& expected)
{
    double worst = 0.0;
    for (cplx e : expected) {
        auto it = std::min_element(computed.begin(), computed.end(),
                                   [&](cplx x, cplx y) { return std::abs(x - e) < std::abs(y - e); });
        worst = std::max(worst, std::abs(*it - e));
        computed.erase(it);
    }
    return worst;
}

std::vector<cplx> sorted_rates(const SpectralDecomposition& d)
{
    std::vector<cplx> v(d.eigenvalues.data(), d.eigenvalues.data() + 16);
    std::sort(v.begin(), v.end(), by_re_im);
    return v;
}

std::vector<cplx> expanded_analytic(double ga, double gb, double g)
{
    std::vector<cplx> v;
    for (const AnalyticEigenvalue& e : analytic_eigenvalues(ga, gb, g))
        for (int k = 0; k < e.multiplicity; ++k) v.push_back(e.value);
    std::sort(v.begin(), v.end(), by_re_im);
    return v;
}

constexpr double kGa = 0.4, kGb = 0.2;  // MHz

}  // namespace

TEST_CASE("vectorization")
{
    const Matrix4c rho = testing::random_density4();
    const Vector16c v = vectorize(rho);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(v(i + 4 * j) == rho(i, j));
    CHECK(devectorize(v) == rho);
    const CMatrix dyn = testing::random_density(3);
    CHECK(devectorize(vectorize(dyn)) == dyn);

    const Matrix4c a = testing::random_complex(4), b = testing::random_complex(4);
    CHECK(testing::max_abs(devectorize(Vector16c(sandwich(a, b) * v)) - a * rho * b) < 1e-14);
}

TEST_CASE("interaction-frame generator entries")
{
    const double eta = 0.3, g = 0.07;
    const LiouvillianMatrix l = build_liouvillian(interaction_model(kGa, kGb, eta, eta, g), Frame::Interaction);
    const Matrix16c& m = l.data;
    CHECK(l.frame == Frame::Interaction);
    CHECK(l.a() == kGa / 2.0);
    CHECK_THAT(l.gamma_eta_a(), WithinAbs(0.7 * kGa, 1e-15));

    // Coherent exchange and the dephasing of |ge><gg|.
    CHECK(std::abs(m(1, 2) - cplx(0.0, -g)) < 1e-15);
    CHECK_THAT(m(1, 1).real(), WithinAbs(-l.b(), 1e-15));
    CHECK_THAT(m(2, 2).real(), WithinAbs(-l.a(), 1e-15));
    CHECK_THAT(m(15, 15).real(), WithinAbs(-2.0 * (l.a() + l.b()), 1e-15));
    CHECK(m(0, 0) == cplx(0.0));

    // Undetected decay feeds the lower-excitation elements.
    const std::vector<std::pair<int, int>> feed_b{{0, 5}, {2, 7}, {8, 13}, {10, 15}};
    const std::vector<std::pair<int, int>> feed_a{{0, 10}, {1, 11}, {4, 14}, {5, 15}};
    for (auto [i, j] : feed_b) CHECK_THAT(m(i, j).real(), WithinAbs(l.gamma_eta_b(), 1e-15));
    for (auto [i, j] : feed_a) CHECK_THAT(m(i, j).real(), WithinAbs(l.gamma_eta_a(), 1e-15));
    int nonzero_below = 0;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            if (std::abs(m(i, j)) > 0.0 && (i == 0 || j == 15) && i != j) ++nonzero_below;
    CHECK(nonzero_below == 4);  // (0,5), (0,10), (5,15), (10,15)
}

TEST_CASE("generator agrees with the postselected right-hand side")
{
    for (Frame frame : {Frame::Lab, Frame::Interaction}) {
        PostselectedModel model = interaction_model(kGa, kGb, 0.6, 0.2, 0.05);
        if (frame == Frame::Lab) {
            model.hamiltonian(1, 1) = 5.0;
            model.hamiltonian(2, 2) = 5.0;
            model.hamiltonian(3, 3) = 10.0;
        }
        const LiouvillianMatrix l = build_liouvillian(model, frame);
        for (int k = 0; k < 100; ++k) {
            const Matrix4c rho = testing::random_density4();
            Matrix4c expected = ghz_to_mhz(1.0) * postselected_linear_rhs(model, rho);
            if (frame == Frame::Interaction) {
                PostselectedModel off = model;
                off.hamiltonian.diagonal().setZero();
                expected = ghz_to_mhz(1.0) * postselected_linear_rhs(off, rho);
            }
            const Matrix4c got = devectorize(Vector16c(l.data * vectorize(rho)));
            CHECK(testing::max_abs(got - expected) <= 1e-12 * std::max(1.0, testing::max_abs(expected)));
        }
    }
}

TEST_CASE("uncoupled unmonitored dynamics separates populations from coherences")
{
    PostselectedModel model = interaction_model(kGa, kGb, 0.0, 0.0, 0.0);
    model.hamiltonian.diagonal() << 0.0, 5.0, 5.1, 10.1;
    const Matrix16c m = build_liouvillian(model, Frame::Lab).data;
    const std::vector<int> populations{0, 5, 10, 15};
    auto is_pop = [&](int i) { return std::find(populations.begin(), populations.end(), i) != populations.end(); };
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            if (is_pop(i) != is_pop(j)) CHECK(m(i, j) == cplx(0.0));
    for (int i : populations) CHECK(m.row(i).imag().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spectrum matches the closed form")
{
    for (double g : {0.02, 0.1, 0.3}) {
        const LiouvillianMatrix l = build_liouvillian(interaction_model(kGa, kGb, 0.5, 0.5, g), Frame::Interaction);
        const SpectralDecomposition d = eigendecompose(l);
        const auto numeric = sorted_rates(d);
        const auto analytic = expanded_analytic(kGa, kGb, g);
        REQUIRE(analytic.size() == 16);
        CHECK(match_error(numeric, analytic) < 1e-8);
        CHECK(d.biorthogonality_error() < 1e-8);
        CHECK_FALSE(d.near_defective);
    }

    // Independent evaluation of the closed form.
    const double a = kGa / 2.0, b = kGb / 2.0, g = 0.1;
    const cplx root = std::sqrt(cplx((a - b) * (a - b) - 4.0 * g * g));
    const auto values = analytic_eigenvalues(kGa, kGb, g);
    REQUIRE(values.size() == 9);
    int total = 0;
    for (const auto& e : values) total += e.multiplicity;
    CHECK(total == 16);
    auto contains = [&](cplx x, int mult) {
        return std::any_of(values.begin(), values.end(),
                           [&](const AnalyticEigenvalue& e) { return std::abs(e.value - x) < 1e-14 && e.multiplicity == mult; });
    };
    CHECK(contains(0.0, 1));
    CHECK(contains(a + b, 4));
    CHECK(contains(2.0 * (a + b), 1));
    CHECK(contains(a + b + root, 1));
    CHECK(contains(a + b - root, 1));
    CHECK(contains(1.5 * (a + b) + 0.5 * root, 2));
    CHECK(contains(0.5 * (a + b) - 0.5 * root, 2));
}

TEST_CASE("detection efficiency leaves the spectrum unchanged")
{
    const auto reference = sorted_rates(eigendecompose(
        build_liouvillian(interaction_model(kGa, kGb, 0.0, 0.0, 0.1), Frame::Interaction)));
    for (double eta : {0.3, 0.8, 1.0}) {
        const auto rates =
            sorted_rates(eigendecompose(build_liouvillian(interaction_model(kGa, kGb, eta, eta, 0.1), Frame::Interaction)));
        CHECK(match_error(rates, reference) < 1e-10);
    }
}

TEST_CASE("steady-state weight is the undetected fraction")
{
    for (double eta : {0.0, 0.5, 0.8, 1.0}) {
        PostselectedModel model = interaction_model(kGa, kGb, eta, eta, 0.1);
        model.hamiltonian.diagonal() << 0.0, 0.005, 0.005, 0.01;
        const SpectralDecomposition d = eigendecompose(build_liouvillian(model, Frame::Lab));
        const Vector16c c = d.coefficients(projector(2));
        int zero = -1;
        for (int k = 0; k < 16; ++k)
            if (std::abs(d.eigenvalues(k)) < 1e-10) zero = k;
        REQUIRE(zero >= 0);
        CHECK(std::abs(c(zero) - cplx(1.0 - eta)) < 1e-9);
    }
}

TEST_CASE("exceptional point")
{
    CHECK_THAT(ep_location(0.4, 0.2), WithinAbs(0.05, 1e-15));
    CHECK_THAT(ep_location(0.2, 0.3), WithinAbs(0.025, 1e-15));
    CHECK_THAT(ep_discriminant(0.4, 0.2, 0.05), WithinAbs(0.0, 1e-15));
    CHECK(ep_discriminant(0.4, 0.2, 0.04) > 0.0);
    CHECK(ep_discriminant(0.4, 0.2, 0.06) < 0.0);

    CHECK(std::isinf(oscillation_period(0.4, 0.2, 0.04)));
    CHECK_THAT(oscillation_period(0.4, 0.2, 0.1), WithinAbs(2.0 * kPi / std::sqrt(0.04 - 0.01), 1e-12));

    const LiouvillianMatrix at_ep = build_liouvillian(interaction_model(0.4, 0.2, 1.0, 1.0, 0.05), Frame::Interaction);
    const SpectralDecomposition d = eigendecompose(at_ep);
    CHECK(d.condition_number > 1e6);
    CHECK(d.near_defective);
    const ReconstructedSeries r = reconstruct_evolution(at_ep, d, projector(2), {0.0, 10.0, 20.0});
    CHECK(r.method == ReconstructionMethod::MatrixExponential);

    const SpectralDecomposition near = eigendecompose(
        build_liouvillian(interaction_model(0.4, 0.2, 1.0, 1.0, 0.0505), Frame::Interaction));
    const SpectralDecomposition far = eigendecompose(
        build_liouvillian(interaction_model(0.4, 0.2, 1.0, 1.0, 0.2), Frame::Interaction));
    CHECK(near.condition_number > far.condition_number);
}

TEST_CASE("modal reconstruction")
{
    for (double eta : {0.0, 0.8, 1.0})
        for (double g : {0.02, 0.1}) {
            const PostselectedModel model = interaction_model(kGa, kGb, eta, eta, g);
            const LiouvillianMatrix l = build_liouvillian(model, Frame::Interaction);
            const SpectralDecomposition d = eigendecompose(l);
            const TimeGrid grid{10.0, 100, 21};  // 1 us samples
            std::vector<double> times_us;
            for (double t : grid.times()) times_us.push_back(t * 1e-3);

            const ReconstructedSeries modal = reconstruct_evolution(l, d, projector(2), times_us);
            CHECK(modal.method == ReconstructionMethod::Modal);
            const ReconstructedSeries expm = propagate_expm(l, projector(2), times_us);
            const PostselectedSeries rk4 = evolve_postselected_linear(model, projector(2), grid);
            for (std::size_t s = 0; s < times_us.size(); ++s) {
                CHECK(testing::max_abs(modal.states[s] - expm.states[s]) < 1e-10);
                CHECK(testing::max_abs(modal.states[s] - rk4.states[s]) < 1e-6);
                CHECK_THAT(modal.traces[s], WithinAbs(rk4.norms[s], 1e-6));
            }
        }
}

TEST_CASE("lab frame differs from the interaction frame only on the diagonal")
{
    PostselectedModel model = interaction_model(kGa, kGb, 0.4, 0.9, 0.2);
    model.hamiltonian.diagonal() << 0.0, 7.1, 7.1002, 14.2;
    const Matrix16c diff = build_liouvillian(model, Frame::Lab).data - build_liouvillian(model, Frame::Interaction).data;
    Matrix16c off = diff;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(diff(i + 4 * j, i + 4 * j) -
                           cplx(0.0, -ghz_to_mhz(1.0) * (model.hamiltonian(i, i) - model.hamiltonian(j, j)).real())) <
                  1e-9);
}
