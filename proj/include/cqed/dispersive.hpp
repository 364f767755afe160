#pragma once

#include "cqed/composite_model.hpp"

#include <array>
#include <string>

namespace cqed {

/// Second-order dispersive quantities for transmon x in {a = 0, b = 1} and
/// ladder step i in {0 (g-e), 1 (e-f)}.
struct DispersiveParams {
    std::array<std::array<double, 2>, 2> lambda{};    // zeta^x n^x_{i,i+1}, GHz
    std::array<std::array<double, 2>, 2> beta{};      // lambda / (E_{i+1} - E_i - omega_c)
    std::array<std::array<double, 2>, 2> eta_disp{};  // lambda / |E_{i+1} - E_i - omega_c|
    std::array<std::array<double, 2>, 2> detuning{};  // E_{i+1} - E_i - omega_c, GHz

    /// G_eg = (lambda^a_01 beta^b_0 + lambda^b_01 beta^a_0) / 2.
    double g_eg() const;
    /// Zero-photon Lamb shift of level i+1 of transmon x: beta^x_i lambda^x_{i,i+1}.
    double lamb_shift(int x, int i) const { return beta[x][i] * lambda[x][i]; }
};

inline constexpr double kDispersiveLimit = 0.15;
inline constexpr double kMinDetuning = 0.5;  // GHz

/// Throws NotDispersive if any |eta| >= 0.15 or a detuning is within 0.5 GHz.
DispersiveParams compute_dispersive_params(const CompositeModel& model);

/// Addends of the second-order transformed Hamiltonian on the composite basis.
struct DispersiveHamiltonian {
    CMatrix h0;
    CMatrix lamb_shift;
    CMatrix ac_stark;
    CMatrix exchange;

    CMatrix total() const { return h0 + lamb_shift + ac_stark + exchange; }
};

DispersiveHamiltonian build_h_d_tct(const CompositeModel& model, const DispersiveParams& params);

/// Cavity-eliminated two-transmon model on {gg, ge, eg, ee} (index 2 i_a + i_b).
struct EffectiveTTModel {
    std::array<std::array<double, 2>, 2> level_energies{};  // [x][i], Lamb-shifted, GHz
    double g_eg = 0.0;
    Matrix4c hamiltonian = Matrix4c::Zero();

    /// Lamb-shifted qubit splitting of transmon x.
    double shifted_gap(int x) const { return level_energies[x][1] - level_energies[x][0]; }
    /// Hamiltonian in the frame rotating at `omega` per excitation.
    Matrix4c rotating_frame(double omega) const;
    /// G_eg (|ge><eg| + h.c.).
    Matrix4c interaction_hamiltonian() const;
};

/// Throws OffResonance when the shifted g-e gaps differ by more than 10 |G_eg|.
EffectiveTTModel build_h_d_tt(const DispersiveParams& params, const TransmonEigensystem& a,
                              const TransmonEigensystem& b);

/// Flux of transmon b that makes the Lamb-shifted g-e gaps equal, found by
/// bisection inside [lo, hi].
double lamb_resonance_flux(const TransmonSpec& spec_a, const TransmonSpec& spec_b,
                           const CavitySpec& cavity, double zeta_a, double zeta_b, double lo,
                           double hi, double tolerance = 1e-12);

/// Key-value text block with every lambda, beta, eta, G_eg and shifted energy.
std::string model_summary_text(const DispersiveParams& params, const EffectiveTTModel& tt);
/// Header and one data row of the same quantities, comma separated.
std::string model_summary_csv(const DispersiveParams& params, const EffectiveTTModel& tt);

}  // namespace cqed
