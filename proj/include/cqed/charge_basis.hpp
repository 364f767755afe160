#pragma once

#include "cqed/common.hpp"

#include <vector>

namespace cqed {

/// Circuit parameters of one flux-tunable transmon. Energies in GHz, flux in
/// units of the flux quantum.
struct TransmonSpec {
    double ec = 0.0;
    double ej_sigma = 0.0;
    double flux = 0.0;
    int charge_cutoff = 20;

    /// Josephson energy after the SQUID flux modulation, E_J,Sigma cos(pi flux).
    double ej_effective() const;
    void validate() const;
};

/// Lowest levels of a transmon, referenced to E_0 = 0, with the ladder charge
/// matrix elements <i|n|i+1> fixed to be real and nonnegative.
struct TransmonEigensystem {
    std::vector<double> energies;
    std::vector<double> charge_elements;

    int levels_kept() const { return static_cast<int>(energies.size()); }
    double gap(int i) const { return energies.at(i + 1) - energies.at(i); }
    double anharmonicity() const { return gap(1) - gap(0); }
};

/// H = 4 E_C n^2 - (E_J,eff / 2)(|n><n+1| + h.c.) on n in [-N_c, N_c].
RMatrix build_charge_hamiltonian(const TransmonSpec& spec);

/// Lowest `levels` eigenpairs (levels <= 5). Throws ConvergenceFailure or
/// CutoffTooSmall when the highest kept level leaks more than 1e-8 weight onto
/// the two boundary charge states.
TransmonEigensystem diagonalize_transmon(const TransmonSpec& spec, int levels = 3);

struct FluxSweepRow {
    double flux = 0.0;
    TransmonEigensystem system;
};

/// Diagonalize at each flux of the grid (grid values within [0, 1]).
/// Per-point failures are rethrown with the offending flux in the message.
std::vector<FluxSweepRow> flux_sweep_spectrum(const TransmonSpec& spec_template,
                                              const std::vector<double>& flux_grid,
                                              int levels = 3);

}  // namespace cqed
