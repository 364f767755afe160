#pragma once

#include "cqed/common.hpp"
#include "cqed/postselection.hpp"

#include <string>
#include <vector>

namespace cqed {

/// Column stacking: vec(rho)[i + 4 j] = rho(i, j).
Vector16c vectorize(const Matrix4c& rho);
Matrix4c devectorize(const Vector16c& v);
CVector vectorize(const CMatrix& rho);
CMatrix devectorize(const CVector& v);

/// Superoperator of X -> left X right, i.e. right^T (x) left.
Matrix16c sandwich(const Matrix4c& left, const Matrix4c& right);

enum class Frame { Lab, Interaction };
std::string_view to_string(Frame f);

/// Linear postselected generator in MHz (inverse microseconds):
/// d vec(rho)/dt = data * vec(rho). Rates in MHz; g_eg in MHz.
struct LiouvillianMatrix {
    Matrix16c data = Matrix16c::Zero();
    Frame frame = Frame::Interaction;
    double gamma_a10 = 0.0;
    double gamma_b10 = 0.0;
    double eta_a = 0.0;
    double eta_b = 0.0;
    double g_eg = 0.0;

    double a() const { return gamma_a10 / 2.0; }
    double b() const { return gamma_b10 / 2.0; }
    double gamma_eta_a() const { return (1.0 - eta_a) * gamma_a10; }
    double gamma_eta_b() const { return (1.0 - eta_b) * gamma_b10; }
};

/// Builds the generator from a postselection model (Hamiltonian in GHz,
/// converted to MHz). The interaction frame keeps only the off-diagonal part
/// of the Hamiltonian, G_eg (|ge><eg| + h.c.).
LiouvillianMatrix build_liouvillian(const PostselectedModel& model, Frame frame);

/// Convenience: interaction-frame model with real exchange g_eg (MHz).
PostselectedModel interaction_model(double gamma_a10, double gamma_b10, double eta_a, double eta_b,
                                    double g_eg_mhz);

struct SpectralDecomposition {
    /// Decay rates lambda_i = -(eigenvalue of the generator), so that
    /// vec(rho(t)) = sum C_i exp(-lambda_i t) R_i. Sorted by (Re, Im).
    Vector16c eigenvalues;
    Matrix16c right;  // columns R_i, unit 2-norm, largest entry real positive
    Matrix16c left;   // rows L_i with left * right = I
    double condition_number = 0.0;
    /// Eigenvector matrix condition number above 1e8.
    bool near_defective = false;

    /// C_i(0) = <L_i | vec(rho0)>.
    Vector16c coefficients(const Matrix4c& rho0) const;
    /// max |L R - I|.
    double biorthogonality_error() const;
};

inline constexpr double kNearDefectiveCondition = 1e8;

/// Throws EigFailure if the QR iteration does not converge.
SpectralDecomposition eigendecompose(const LiouvillianMatrix& l);

/// Closed-form interaction-frame eigenvalue family.
struct AnalyticEigenvalue {
    int label = 0;  // 1..9
    cplx value;
    int multiplicity = 1;
};

/// (A - B)^2 - 4 G^2 with A = Gamma_a/2, B = Gamma_b/2.
double ep_discriminant(double gamma_a10, double gamma_b10, double g_eg);

std::vector<AnalyticEigenvalue> analytic_eigenvalues(double gamma_a10, double gamma_b10, double g_eg);

/// |Gamma_a - Gamma_b| / 4.
double ep_location(double gamma_a10, double gamma_b10);

/// Period of the normalized population oscillation in the unbroken phase,
/// 2 pi / sqrt(4 G^2 - (A - B)^2); infinity when the discriminant is >= 0.
double oscillation_period(double gamma_a10, double gamma_b10, double g_eg);

enum class ReconstructionMethod { Modal, MatrixExponential };
std::string_view to_string(ReconstructionMethod m);

struct ReconstructedSeries {
    std::vector<double> times;     // us
    std::vector<Matrix4c> states;  // normalized
    std::vector<double> traces;    // unnormalized trace
    ReconstructionMethod method = ReconstructionMethod::Modal;
};

/// Modal sum vec(rho(t)) = sum C_i exp(-lambda_i t) R_i, then division by the
/// trace. Coefficients below 1e-13 of the largest are zeroed, since they are
/// rounding residue of exactly vanishing projections and would otherwise
/// dominate at long times. Falls back to the matrix exponential when the
/// decomposition is near defective.
ReconstructedSeries reconstruct_evolution(const LiouvillianMatrix& l, const SpectralDecomposition& decomp,
                                          const Matrix4c& rho0, const std::vector<double>& times_us);

/// exp(L t) vec(rho0) with a scaling-and-squaring Pade exponential.
ReconstructedSeries propagate_expm(const LiouvillianMatrix& l, const Matrix4c& rho0,
                                   const std::vector<double>& times_us);

}  // namespace cqed
