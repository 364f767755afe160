#pragma once

#include "cqed/lindblad.hpp"
#include "cqed/rng.hpp"
#include "cqed/trajectories.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cqed {

/// Two-transmon model under no-click postselection. Hamiltonian in GHz on
/// {gg, ge, eg, ee}; rates in MHz.
struct PostselectedModel {
    Matrix4c hamiltonian = Matrix4c::Zero();
    double gamma_a10 = 0.0;
    double gamma_b10 = 0.0;
    double eta_a = 0.0;
    double eta_b = 0.0;

    void validate() const;
};

/// sigma_x = |g><e| of transmon x (0 = a, 1 = b) on the two-qubit space.
Matrix4c lowering_operator(int x);
/// |e><e| of transmon x on the two-qubit space.
Matrix4c excited_projector(int x);

/// Linear no-jump generator: -i[H, rho] + sum (1 - eta) Gamma D[sigma] rho
/// - sum eta Gamma {P_e, rho} / 2. Per ns.
Matrix4c postselected_linear_rhs(const PostselectedModel& model, const Matrix4c& rho);

/// Trace-preserving nonlinear form: the linear generator plus
/// sum eta Gamma Tr(P_e rho) rho.
Matrix4c postselected_rhs(const PostselectedModel& model, const Matrix4c& rho);

/// Column-stacked 16 x 16 matrix of the linear generator (per ns).
Matrix16c postselected_superoperator(const PostselectedModel& model);

struct PostselectedSeries {
    std::vector<double> times;  // ns
    std::vector<Matrix4c> states;  // normalized
    std::vector<double> norms;  // raw trace, the no-click survival weight
};

/// Fixed-step RK4 of the linear generator followed by normalization.
/// Throws NormUnderflow when the trace drops below 1e-12.
PostselectedSeries evolve_postselected_linear(const PostselectedModel& model, const Matrix4c& rho0,
                                              const TimeGrid& grid);

/// Fixed-step RK4 of the nonlinear form (cross-check path; norms are 1).
PostselectedSeries evolve_postselected_nonlinear(const PostselectedModel& model, const Matrix4c& rho0,
                                                 const TimeGrid& grid);

struct SmeRecord {
    std::vector<double> times;
    std::vector<Matrix4c> states;
    std::vector<ClickEvent> jumps;
};

/// One record of the stochastic master equation. Each step draws dN_x with
/// probability eta_x Gamma_x Tr(P_e^x rho) dt; a jump resets with
/// sigma rho sigma^dag / Tr(P_e^x rho), otherwise the no-jump drift
/// (the nonlinear form above) is advanced by one RK4 step.
SmeRecord evolve_sme(const PostselectedModel& model, const Matrix4c& rho0, const TimeGrid& grid,
                     std::uint64_t seed, std::int64_t stream = 0);

/// Same schema as the master-equation CSV plus survival_weight.
std::string postselected_csv(const PostselectedSeries& series);

}  // namespace cqed
