#pragma once

#include "cqed/charge_basis.hpp"
#include "cqed/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cqed {

struct CavitySpec {
    double frequency = 15.0;  // GHz
    int fock_cutoff = 3;      // max photon number

    void validate() const;
};

/// Product-basis label |i_a, n_cav, i_b>.
struct BasisLabel {
    int level_a = 0;
    int photons = 0;
    int level_b = 0;

    /// Total excitation number (transmon level index counts as excitations).
    int excitations() const { return level_a + photons + level_b; }
    /// Compact form, e.g. "e0g" for |e_a 0 g_b>.
    std::string str() const;

    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

char level_letter(int level);

/// Transmon (x) cavity (x) transmon Hamiltonian with three transmon levels.
/// Basis index = i_a (N_ph+1) 3 + n_cav 3 + i_b.
struct CompositeModel {
    TransmonEigensystem transmon_a;
    TransmonEigensystem transmon_b;
    CavitySpec cavity;
    double coupling_a = 0.0;  // zeta^a, GHz
    double coupling_b = 0.0;  // zeta^b, GHz
    CMatrix hamiltonian;
    std::vector<BasisLabel> basis_labels;

    Eigen::Index dimension() const { return hamiltonian.rows(); }
    Eigen::Index index_of(const BasisLabel& label) const;
    /// Diagonal matrix of total excitation numbers.
    CMatrix excitation_operator() const;
};

CompositeModel build_tct_hamiltonian(const TransmonEigensystem& a, const TransmonEigensystem& b,
                                     const CavitySpec& cavity, double zeta_a, double zeta_b);

/// Hamiltonian, jump operators, and labels restricted to the sectors with at
/// most `max_excitations` quanta. Exact for excitation-conserving Hamiltonians
/// whose dissipators only lower the excitation number.
struct SectorProjection {
    std::vector<Eigen::Index> indices;
    std::vector<BasisLabel> labels;

    CMatrix restrict(const CMatrix& full) const;
    CMatrix embed(const CMatrix& reduced, Eigen::Index full_dimension) const;
};

SectorProjection excitation_sectors(const std::vector<BasisLabel>& labels, int max_excitations);

/// Reduced two-transmon state on {gg, ge, eg, ee}: traces out the cavity and
/// keeps the g/e levels of each transmon.
Matrix4c reduced_transmon_state(const CMatrix& rho, const std::vector<BasisLabel>& labels);

/// Builds the composite model for a given flux of transmon b.
using ModelFamily = std::function<CompositeModel(double flux_b)>;

ModelFamily make_model_family(const TransmonSpec& spec_a, const TransmonSpec& spec_b,
                              const CavitySpec& cavity, double zeta_a, double zeta_b);

struct SpectrumRow {
    double flux_b = 0.0;
    std::vector<double> eigenvalues;  // ascending
    std::vector<BasisLabel> dominant;  // label of the largest eigenvector component
};

/// Sorted dressed eigenvalues per flux point. With `zero_photon_only`, only
/// eigenstates whose dominant component has no cavity photon are kept.
std::vector<SpectrumRow> tct_spectrum_sweep(const ModelFamily& family,
                                            const std::vector<double>& flux_grid,
                                            bool zero_photon_only = false);

/// Gap between the two lowest dressed levels of the single-excitation block.
double single_excitation_gap(const CompositeModel& model);

struct AvoidedCrossing {
    double flux = 0.0;
    double gap = 0.0;
};

/// Golden-section search for the minimum single-excitation gap inside
/// [lo, hi] to `tolerance` flux quanta. Throws NoMinimum when the minimum sits
/// on the bracket boundary (gap monotonic over the bracket).
AvoidedCrossing find_avoided_crossing(const ModelFamily& family, double lo, double hi,
                                      double tolerance = 1e-6);

}  // namespace cqed
