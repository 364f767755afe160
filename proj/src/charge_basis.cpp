#include "cqed/charge_basis.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace cqed {

double TransmonSpec::ej_effective() const { return ej_sigma * std::cos(kPi * flux); }

void TransmonSpec::validate() const
{
    require(ec > 0.0, ErrorKind::InvalidArgument, "TransmonSpec: ec must be positive");
    require(ej_sigma > 0.0, ErrorKind::InvalidArgument, "TransmonSpec: ej_sigma must be positive");
    require(charge_cutoff >= 10, ErrorKind::InvalidArgument, "TransmonSpec: charge_cutoff must be >= 10");
    require(std::isfinite(flux), ErrorKind::InvalidArgument, "TransmonSpec: flux must be finite");
}

RMatrix build_charge_hamiltonian(const TransmonSpec& spec)
{
    spec.validate();
    const int nc = spec.charge_cutoff;
    const int dim = 2 * nc + 1;
    const double hop = -0.5 * spec.ej_effective();
    RMatrix h = RMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        const double n = k - nc;
        h(k, k) = 4.0 * spec.ec * n * n;
        if (k + 1 < dim) {
            h(k, k + 1) = hop;
            h(k + 1, k) = hop;
        }
    }
    return h;
}

TransmonEigensystem diagonalize_transmon(const TransmonSpec& spec, int levels)
{
    require(levels >= 1 && levels <= 5, ErrorKind::InvalidArgument,
            "diagonalize_transmon: levels must be in [1, 5]");
    const RMatrix h = build_charge_hamiltonian(spec);
    Eigen::SelfAdjointEigenSolver<RMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        fail(ErrorKind::ConvergenceFailure, "diagonalize_transmon: eigensolver did not converge");
    }
    RMatrix vecs = solver.eigenvectors().leftCols(levels);
    const RVector& vals = solver.eigenvalues();
    const Eigen::Index dim = h.rows();

    const double boundary = vecs(0, levels - 1) * vecs(0, levels - 1) +
                            vecs(dim - 1, levels - 1) * vecs(dim - 1, levels - 1);
    if (boundary > 1e-8) {
        std::ostringstream msg;
        msg << "diagonalize_transmon: level " << levels - 1 << " has weight " << boundary
            << " on the boundary charge states (N_c = " << spec.charge_cutoff << ")";
        fail(ErrorKind::CutoffTooSmall, msg.str());
    }

    const RVector charge = RVector::LinSpaced(dim, -spec.charge_cutoff, spec.charge_cutoff);
    TransmonEigensystem out;
    out.energies.resize(levels);
    for (int i = 0; i < levels; ++i) out.energies[i] = vals(i) - vals(0);
    for (int i = 0; i + 1 < levels; ++i) {
        double element = vecs.col(i).dot(charge.cwiseProduct(vecs.col(i + 1)));
        if (element < 0.0) {
            vecs.col(i + 1) *= -1.0;
            element = -element;
        }
        out.charge_elements.push_back(element);
    }
    return out;
}

std::vector<FluxSweepRow> flux_sweep_spectrum(const TransmonSpec& spec_template,
                                              const std::vector<double>& flux_grid, int levels)
{
    require(!flux_grid.empty(), ErrorKind::InvalidArgument, "flux_sweep_spectrum: empty flux grid");
    std::vector<FluxSweepRow> rows;
    rows.reserve(flux_grid.size());
    for (double flux : flux_grid) {
        if (!(flux >= 0.0 && flux <= 1.0)) {
            std::ostringstream msg;
            msg << "flux_sweep_spectrum: flux " << flux << " outside [0, 1]";
            fail(ErrorKind::InvalidArgument, msg.str());
        }
        TransmonSpec spec = spec_template;
        spec.flux = flux;
        try {
            rows.push_back({flux, diagonalize_transmon(spec, levels)});
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "at flux " << flux << ": " << e.what();
            throw Error(e.kind(), msg.str());
        }
    }
    return rows;
}

}  // namespace cqed
