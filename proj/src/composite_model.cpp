#include "cqed/composite_model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cqed {

void CavitySpec::validate() const
{
    require(frequency > 0.0, ErrorKind::InvalidArgument, "CavitySpec: frequency must be positive");
    require(fock_cutoff >= 2, ErrorKind::InvalidArgument, "CavitySpec: fock_cutoff must be >= 2");
}

char level_letter(int level)
{
    static constexpr char letters[] = {'g', 'e', 'f', 'h', 'i'};
    return level >= 0 && level < 5 ? letters[level] : '?';
}

std::string BasisLabel::str() const
{
    std::string s;
    s += level_letter(level_a);
    s += std::to_string(photons);
    s += level_letter(level_b);
    return s;
}

Eigen::Index CompositeModel::index_of(const BasisLabel& label) const
{
    const auto it = std::find(basis_labels.begin(), basis_labels.end(), label);
    if (it == basis_labels.end()) fail(ErrorKind::UnknownLabel, "no basis state " + label.str());
    return static_cast<Eigen::Index>(it - basis_labels.begin());
}

CMatrix CompositeModel::excitation_operator() const
{
    CMatrix n = CMatrix::Zero(dimension(), dimension());
    for (Eigen::Index k = 0; k < dimension(); ++k) n(k, k) = basis_labels[k].excitations();
    return n;
}

CompositeModel build_tct_hamiltonian(const TransmonEigensystem& a, const TransmonEigensystem& b,
                                     const CavitySpec& cavity, double zeta_a, double zeta_b)
{
    cavity.validate();
    if (a.levels_kept() != 3 || b.levels_kept() != 3) {
        fail(ErrorKind::DimensionMismatch, "build_tct_hamiltonian: both transmons need 3 levels");
    }
    const int nph = cavity.fock_cutoff + 1;
    const Eigen::Index dim = 9 * nph;
    auto index = [nph](int ia, int n, int ib) -> Eigen::Index { return ia * nph * 3 + n * 3 + ib; };

    CompositeModel model;
    model.transmon_a = a;
    model.transmon_b = b;
    model.cavity = cavity;
    model.coupling_a = zeta_a;
    model.coupling_b = zeta_b;
    model.hamiltonian = CMatrix::Zero(dim, dim);
    model.basis_labels.resize(dim);

    CMatrix& h = model.hamiltonian;
    for (int ia = 0; ia < 3; ++ia) {
        for (int n = 0; n < nph; ++n) {
            for (int ib = 0; ib < 3; ++ib) {
                const Eigen::Index k = index(ia, n, ib);
                model.basis_labels[k] = {ia, n, ib};
                h(k, k) = a.energies[ia] + b.energies[ib] + cavity.frequency * n;
            }
        }
    }
    // zeta n_{i,i+1} (|i><i+1| a^dag + h.c.) for each transmon.
    for (int n = 0; n + 1 < nph; ++n) {
        const double amp = std::sqrt(static_cast<double>(n + 1));
        for (int i = 0; i < 2; ++i) {
            for (int other = 0; other < 3; ++other) {
                const double ga = zeta_a * a.charge_elements[i] * amp;
                const Eigen::Index from_a = index(i + 1, n, other);
                const Eigen::Index to_a = index(i, n + 1, other);
                h(to_a, from_a) = ga;
                h(from_a, to_a) = ga;

                const double gb = zeta_b * b.charge_elements[i] * amp;
                const Eigen::Index from_b = index(other, n, i + 1);
                const Eigen::Index to_b = index(other, n + 1, i);
                h(to_b, from_b) = gb;
                h(from_b, to_b) = gb;
            }
        }
    }
    return model;
}

CMatrix SectorProjection::restrict(const CMatrix& full) const
{
    const auto n = static_cast<Eigen::Index>(indices.size());
    CMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = full(indices[i], indices[j]);
    return out;
}

CMatrix SectorProjection::embed(const CMatrix& reduced, Eigen::Index full_dimension) const
{
    CMatrix out = CMatrix::Zero(full_dimension, full_dimension);
    const auto n = static_cast<Eigen::Index>(indices.size());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(indices[i], indices[j]) = reduced(i, j);
    return out;
}

SectorProjection excitation_sectors(const std::vector<BasisLabel>& labels, int max_excitations)
{
    SectorProjection p;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k].excitations() <= max_excitations) {
            p.indices.push_back(static_cast<Eigen::Index>(k));
            p.labels.push_back(labels[k]);
        }
    }
    return p;
}

Matrix4c reduced_transmon_state(const CMatrix& rho, const std::vector<BasisLabel>& labels)
{
    require(rho.rows() == static_cast<Eigen::Index>(labels.size()) && rho.cols() == rho.rows(),
            ErrorKind::DimensionMismatch, "reduced_transmon_state: labels do not match state");
    Matrix4c out = Matrix4c::Zero();
    const auto n = static_cast<Eigen::Index>(labels.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const BasisLabel& li = labels[i];
        if (li.level_a > 1 || li.level_b > 1) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            const BasisLabel& lj = labels[j];
            if (lj.level_a > 1 || lj.level_b > 1 || lj.photons != li.photons) continue;
            out(2 * li.level_a + li.level_b, 2 * lj.level_a + lj.level_b) += rho(i, j);
        }
    }
    return out;
}

ModelFamily make_model_family(const TransmonSpec& spec_a, const TransmonSpec& spec_b,
                              const CavitySpec& cavity, double zeta_a, double zeta_b)
{
    const TransmonEigensystem sys_a = diagonalize_transmon(spec_a, 3);
    return [sys_a, spec_b, cavity, zeta_a, zeta_b](double flux_b) {
        TransmonSpec b = spec_b;
        b.flux = flux_b;
        return build_tct_hamiltonian(sys_a, diagonalize_transmon(b, 3), cavity, zeta_a, zeta_b);
    };
}

std::vector<SpectrumRow> tct_spectrum_sweep(const ModelFamily& family,
                                            const std::vector<double>& flux_grid,
                                            bool zero_photon_only)
{
    std::vector<SpectrumRow> rows;
    rows.reserve(flux_grid.size());
    for (double flux : flux_grid) {
        if (!(flux >= 0.0 && flux < 0.5)) {
            fail(ErrorKind::InvalidArgument, "tct_spectrum_sweep: flux_b outside [0, 0.5)");
        }
        const CompositeModel model = family(flux);
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(model.hamiltonian);
        if (solver.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "tct_spectrum_sweep: diagonalization failed at flux " << flux;
            fail(ErrorKind::ConvergenceFailure, msg.str());
        }
        SpectrumRow row;
        row.flux_b = flux;
        for (Eigen::Index k = 0; k < model.dimension(); ++k) {
            Eigen::Index imax = 0;
            solver.eigenvectors().col(k).cwiseAbs2().maxCoeff(&imax);
            const BasisLabel& label = model.basis_labels[imax];
            if (zero_photon_only && label.photons != 0) continue;
            row.eigenvalues.push_back(solver.eigenvalues()(k));
            row.dominant.push_back(label);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

double single_excitation_gap(const CompositeModel& model)
{
    std::vector<Eigen::Index> block;
    for (Eigen::Index k = 0; k < model.dimension(); ++k)
        if (model.basis_labels[k].excitations() == 1) block.push_back(k);
    const auto n = static_cast<Eigen::Index>(block.size());
    CMatrix sub(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = model.hamiltonian(block[i], block[j]);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sub, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        fail(ErrorKind::ConvergenceFailure, "single_excitation_gap: diagonalization failed");
    }
    return solver.eigenvalues()(1) - solver.eigenvalues()(0);
}

AvoidedCrossing find_avoided_crossing(const ModelFamily& family, double lo, double hi,
                                      double tolerance)
{
    require(lo < hi, ErrorKind::InvalidArgument, "find_avoided_crossing: empty bracket");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto gap = [&family](double flux) { return single_excitation_gap(family(flux)); };

    const double lo0 = lo;
    const double hi0 = hi;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = gap(x1);
    double f2 = gap(x2);
    while (hi - lo > tolerance) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = gap(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = gap(x2);
        }
    }
    const double flux = 0.5 * (lo + hi);
    if (flux - lo0 <= 2.0 * tolerance || hi0 - flux <= 2.0 * tolerance) {
        std::ostringstream msg;
        msg << "find_avoided_crossing: gap is monotonic over [" << lo0 << ", " << hi0 << "]";
        fail(ErrorKind::NoMinimum, msg.str());
    }
    return {flux, gap(flux)};
}

}  // namespace cqed
