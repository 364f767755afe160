#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cqed {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Matrix4c = Eigen::Matrix4cd;
using Vector16c = Eigen::Matrix<cplx, 16, 1>;
using Matrix16c = Eigen::Matrix<cplx, 16, 16>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

/// Rates are quoted in MHz (inverse microseconds); Hamiltonians in GHz.
constexpr double mhz_to_ghz(double mhz) { return mhz * 1e-3; }
constexpr double ghz_to_mhz(double ghz) { return ghz * 1e3; }

enum class ErrorKind {
    InvalidArgument,
    DimensionMismatch,
    ConvergenceFailure,
    CutoffTooSmall,
    NoMinimum,
    NotDispersive,
    OffResonance,
    InvariantViolation,
    UnknownLabel,
    MarkovViolation,
    ZeroNorm,
    EmptyEnsemble,
    NormUnderflow,
    EigFailure,
    Config,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message)
{
    if (!condition) fail(kind, message);
}

}  // namespace cqed
