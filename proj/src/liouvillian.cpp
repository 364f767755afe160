#include "cqed/liouvillian.hpp"

#include "cqed/eigensolver.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace cqed {
namespace {

constexpr double kCoefficientFloor = 1e-13;

ReconstructedSeries normalize_series(const std::vector<double>& times, const std::vector<Vector16c>& vecs,
                                     ReconstructionMethod method)
{
    ReconstructedSeries out;
    out.times = times;
    out.method = method;
    for (std::size_t k = 0; k < vecs.size(); ++k) {
        const Matrix4c rho = devectorize(vecs[k]);
        const double tr = rho.trace().real();
        if (!(tr > 0.0)) {
            std::ostringstream msg;
            msg << "reconstruct_evolution: trace " << tr << " at t = " << times[k] << " us";
            fail(ErrorKind::NormUnderflow, msg.str());
        }
        out.traces.push_back(tr);
        out.states.push_back(rho / tr);
    }
    return out;
}

}  // namespace

Vector16c vectorize(const Matrix4c& rho) { return rho.reshaped(16, 1); }

Matrix4c devectorize(const Vector16c& v) { return v.reshaped(4, 4); }

CVector vectorize(const CMatrix& rho)
{
    require(rho.rows() == rho.cols(), ErrorKind::DimensionMismatch, "vectorize: matrix is not square");
    return rho.reshaped(rho.size(), 1);
}

CMatrix devectorize(const CVector& v)
{
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    require(n * n == v.size(), ErrorKind::DimensionMismatch, "devectorize: length is not a square");
    return v.reshaped(n, n);
}

Matrix16c sandwich(const Matrix4c& left, const Matrix4c& right)
{
    return Eigen::kroneckerProduct(right.transpose(), left).eval();
}

std::string_view to_string(Frame f) { return f == Frame::Lab ? "lab" : "interaction"; }

std::string_view to_string(ReconstructionMethod m)
{
    return m == ReconstructionMethod::Modal ? "modal" : "matrix_exponential";
}

LiouvillianMatrix build_liouvillian(const PostselectedModel& model, Frame frame)
{
    model.validate();
    PostselectedModel framed = model;
    if (frame == Frame::Interaction) framed.hamiltonian.diagonal().setZero();

    LiouvillianMatrix l;
    // The generator is per ns; per us is a factor 1e3.
    l.data = ghz_to_mhz(1.0) * postselected_superoperator(framed);
    l.frame = frame;
    l.gamma_a10 = model.gamma_a10;
    l.gamma_b10 = model.gamma_b10;
    l.eta_a = model.eta_a;
    l.eta_b = model.eta_b;
    l.g_eg = ghz_to_mhz(framed.hamiltonian(1, 2).real());
    return l;
}

PostselectedModel interaction_model(double gamma_a10, double gamma_b10, double eta_a, double eta_b,
                                    double g_eg_mhz)
{
    PostselectedModel m;
    m.gamma_a10 = gamma_a10;
    m.gamma_b10 = gamma_b10;
    m.eta_a = eta_a;
    m.eta_b = eta_b;
    m.hamiltonian(1, 2) = mhz_to_ghz(g_eg_mhz);
    m.hamiltonian(2, 1) = mhz_to_ghz(g_eg_mhz);
    return m;
}

Vector16c SpectralDecomposition::coefficients(const Matrix4c& rho0) const { return left * vectorize(rho0); }

double SpectralDecomposition::biorthogonality_error() const
{
    return (left * right - Matrix16c::Identity()).cwiseAbs().maxCoeff();
}

SpectralDecomposition eigendecompose(const LiouvillianMatrix& l)
{
    const EigenPairs pairs = eigen_decompose(CMatrix(l.data));
    std::vector<int> order(16);
    std::iota(order.begin(), order.end(), 0);
    std::vector<cplx> lambda(16);
    for (int i = 0; i < 16; ++i) lambda[i] = -pairs.values(i);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        if (lambda[x].real() != lambda[y].real()) return lambda[x].real() < lambda[y].real();
        return lambda[x].imag() < lambda[y].imag();
    });

    SpectralDecomposition d;
    for (int k = 0; k < 16; ++k) {
        d.eigenvalues(k) = lambda[order[k]];
        d.right.col(k) = pairs.vectors.col(order[k]);
    }
    d.condition_number = condition_number(CMatrix(d.right));
    d.near_defective = !(d.condition_number <= kNearDefectiveCondition);
    d.left = d.right.partialPivLu().inverse();
    return d;
}

double ep_discriminant(double gamma_a10, double gamma_b10, double g_eg)
{
    const double diff = (gamma_a10 - gamma_b10) / 2.0;
    return diff * diff - 4.0 * g_eg * g_eg;
}

std::vector<AnalyticEigenvalue> analytic_eigenvalues(double gamma_a10, double gamma_b10, double g_eg)
{
    const double s = (gamma_a10 + gamma_b10) / 2.0;  // A + B
    const cplx root = std::sqrt(cplx(ep_discriminant(gamma_a10, gamma_b10, g_eg), 0.0));
    return {
        {1, 0.0, 1},
        {2, s, 4},
        {3, 2.0 * s, 1},
        {4, s + root, 1},
        {5, s - root, 1},
        {6, 1.5 * s + 0.5 * root, 2},
        {7, 1.5 * s - 0.5 * root, 2},
        {8, 0.5 * s + 0.5 * root, 2},
        {9, 0.5 * s - 0.5 * root, 2},
    };
}

double ep_location(double gamma_a10, double gamma_b10)
{
    require(gamma_a10 >= 0.0 && gamma_b10 >= 0.0, ErrorKind::InvalidArgument,
            "ep_location: rates must be nonnegative");
    return std::abs(gamma_a10 - gamma_b10) / 4.0;
}

double oscillation_period(double gamma_a10, double gamma_b10, double g_eg)
{
    const double disc = ep_discriminant(gamma_a10, gamma_b10, g_eg);
    if (disc >= 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * kPi / std::sqrt(-disc);
}

ReconstructedSeries propagate_expm(const LiouvillianMatrix& l, const Matrix4c& rho0,
                                   const std::vector<double>& times_us)
{
    const Vector16c v0 = vectorize(rho0);
    std::vector<Vector16c> vecs;
    vecs.reserve(times_us.size());
    for (double t : times_us) {
        const Matrix16c m = (l.data * t).exp();
        vecs.push_back(m * v0);
    }
    return normalize_series(times_us, vecs, ReconstructionMethod::MatrixExponential);
}

ReconstructedSeries reconstruct_evolution(const LiouvillianMatrix& l, const SpectralDecomposition& decomp,
                                          const Matrix4c& rho0, const std::vector<double>& times_us)
{
    if (decomp.near_defective) return propagate_expm(l, rho0, times_us);
    Vector16c c = decomp.coefficients(rho0);
    const double largest = c.cwiseAbs().maxCoeff();
    for (int i = 0; i < 16; ++i)
        if (std::abs(c(i)) < kCoefficientFloor * largest) c(i) = 0.0;

    std::vector<Vector16c> vecs;
    vecs.reserve(times_us.size());
    for (double t : times_us) {
        Vector16c weights;
        for (int i = 0; i < 16; ++i) weights(i) = c(i) * std::exp(-decomp.eigenvalues(i) * t);
        vecs.push_back(decomp.right * weights);
    }
    return normalize_series(times_us, vecs, ReconstructionMethod::Modal);
}

}  // namespace cqed
