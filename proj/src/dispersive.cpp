#include "cqed/dispersive.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace cqed {
namespace {

const TransmonEigensystem& transmon(const CompositeModel& model, int x)
{
    return x == 0 ? model.transmon_a : model.transmon_b;
}

double dispersive_beta(double lambda, double detuning) { return lambda / detuning; }

}  // namespace

double DispersiveParams::g_eg() const
{
    return 0.5 * (lambda[0][0] * beta[1][0] + lambda[1][0] * beta[0][0]);
}

DispersiveParams compute_dispersive_params(const CompositeModel& model)
{
    DispersiveParams p;
    const double zeta[2] = {model.coupling_a, model.coupling_b};
    for (int x = 0; x < 2; ++x) {
        const TransmonEigensystem& sys = transmon(model, x);
        for (int i = 0; i < 2; ++i) {
            const double detuning = sys.gap(i) - model.cavity.frequency;
            if (std::abs(detuning) <= kMinDetuning) {
                std::ostringstream msg;
                msg << "detuning " << detuning << " GHz of transmon " << "ab"[x] << " step " << i
                    << " is within " << kMinDetuning << " GHz of the cavity";
                fail(ErrorKind::NotDispersive, msg.str());
            }
            p.detuning[x][i] = detuning;
            p.lambda[x][i] = zeta[x] * sys.charge_elements[i];
            p.beta[x][i] = dispersive_beta(p.lambda[x][i], detuning);
            p.eta_disp[x][i] = p.lambda[x][i] / std::abs(detuning);
            if (std::abs(p.eta_disp[x][i]) >= kDispersiveLimit) {
                std::ostringstream msg;
                msg << "eta^" << "ab"[x] << "_" << i << " = " << p.eta_disp[x][i]
                    << " exceeds " << kDispersiveLimit;
                fail(ErrorKind::NotDispersive, msg.str());
            }
        }
    }
    return p;
}

DispersiveHamiltonian build_h_d_tct(const CompositeModel& model, const DispersiveParams& params)
{
    const Eigen::Index dim = model.dimension();
    DispersiveHamiltonian out;
    out.h0 = CMatrix::Zero(dim, dim);
    out.lamb_shift = CMatrix::Zero(dim, dim);
    out.ac_stark = CMatrix::Zero(dim, dim);
    out.exchange = CMatrix::Zero(dim, dim);

    const auto& labels = model.basis_labels;
    for (Eigen::Index k = 0; k < dim; ++k) {
        const BasisLabel& l = labels[k];
        const int levels[2] = {l.level_a, l.level_b};
        out.h0(k, k) = model.transmon_a.energies[l.level_a] + model.transmon_b.energies[l.level_b] +
                       model.cavity.frequency * l.photons;
        double ls = 0.0;
        double ac = 0.0;
        for (int x = 0; x < 2; ++x) {
            const int lev = levels[x];
            for (int i = 0; i < 2; ++i) {
                const double chi = params.lambda[x][i] * params.beta[x][i];
                if (lev == i + 1) {
                    ls += chi;
                    ac += chi * l.photons;
                }
                if (lev == i) ac -= chi * l.photons;
            }
        }
        out.lamb_shift(k, k) = ls;
        out.ac_stark(k, k) = ac;
    }

    // (1/2)(lambda^a_i beta^b_k + lambda^b_k beta^a_i)(|i, k+1><i+1, k| + h.c.), photons unchanged.
    for (Eigen::Index r = 0; r < dim; ++r) {
        const BasisLabel& from = labels[r];  // |i+1, k>
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < 2; ++k) {
                if (from.level_a != i + 1 || from.level_b != k) continue;
                const double strength = 0.5 * (params.lambda[0][i] * params.beta[1][k] +
                                                params.lambda[1][k] * params.beta[0][i]);
                const Eigen::Index c = model.index_of({i, from.photons, k + 1});
                out.exchange(c, r) += strength;
                out.exchange(r, c) += strength;
            }
        }
    }
    return out;
}

Matrix4c EffectiveTTModel::rotating_frame(double omega) const
{
    Matrix4c h = hamiltonian;
    h(1, 1) -= omega;
    h(2, 2) -= omega;
    h(3, 3) -= 2.0 * omega;
    return h;
}

Matrix4c EffectiveTTModel::interaction_hamiltonian() const
{
    Matrix4c h = Matrix4c::Zero();
    h(1, 2) = g_eg;
    h(2, 1) = g_eg;
    return h;
}

EffectiveTTModel build_h_d_tt(const DispersiveParams& params, const TransmonEigensystem& a,
                              const TransmonEigensystem& b)
{
    EffectiveTTModel tt;
    const TransmonEigensystem* sys[2] = {&a, &b};
    for (int x = 0; x < 2; ++x) {
        tt.level_energies[x][0] = sys[x]->energies.at(0);
        tt.level_energies[x][1] = sys[x]->energies.at(1) + params.lamb_shift(x, 0);
    }
    tt.g_eg = params.g_eg();
    const double mismatch = std::abs(tt.shifted_gap(0) - tt.shifted_gap(1));
    if (mismatch > 10.0 * std::abs(tt.g_eg)) {
        std::ostringstream msg;
        msg << "Lamb-shifted gaps differ by " << mismatch << " GHz, more than 10 |G_eg| = "
            << 10.0 * std::abs(tt.g_eg);
        fail(ErrorKind::OffResonance, msg.str());
    }
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib)
            tt.hamiltonian(2 * ia + ib, 2 * ia + ib) = tt.level_energies[0][ia] + tt.level_energies[1][ib];
    tt.hamiltonian(1, 2) = tt.g_eg;
    tt.hamiltonian(2, 1) = tt.g_eg;
    return tt;
}

double lamb_resonance_flux(const TransmonSpec& spec_a, const TransmonSpec& spec_b,
                           const CavitySpec& cavity, double zeta_a, double zeta_b, double lo,
                           double hi, double tolerance)
{
    const TransmonEigensystem sys_a = diagonalize_transmon(spec_a, 3);
    const double la = zeta_a * sys_a.charge_elements[0];
    const double shifted_a = sys_a.gap(0) + la * la / (sys_a.gap(0) - cavity.frequency);
    auto mismatch = [&](double flux) {
        TransmonSpec b = spec_b;
        b.flux = flux;
        const TransmonEigensystem sys_b = diagonalize_transmon(b, 3);
        const double lb = zeta_b * sys_b.charge_elements[0];
        return sys_b.gap(0) + lb * lb / (sys_b.gap(0) - cavity.frequency) - shifted_a;
    };
    double f_lo = mismatch(lo);
    const double f_hi = mismatch(hi);
    if (f_lo * f_hi > 0.0) {
        fail(ErrorKind::OffResonance, "lamb_resonance_flux: no resonance inside the bracket");
    }
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = mismatch(mid);
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::string model_summary_text(const DispersiveParams& params, const EffectiveTTModel& tt)
{
    std::ostringstream out;
    out << std::setprecision(15);
    for (int x = 0; x < 2; ++x) {
        for (int i = 0; i < 2; ++i) {
            const std::string tag = std::string(1, "ab"[x]) + "_" + std::to_string(i);
            out << "lambda_" << tag << " = " << params.lambda[x][i] << '\n';
            out << "beta_" << tag << " = " << params.beta[x][i] << '\n';
            out << "eta_" << tag << " = " << params.eta_disp[x][i] << '\n';
        }
    }
    out << "g_eg_ghz = " << tt.g_eg << '\n';
    out << "shifted_gap_a_ghz = " << tt.shifted_gap(0) << '\n';
    out << "shifted_gap_b_ghz = " << tt.shifted_gap(1) << '\n';
    return out.str();
}

std::string model_summary_csv(const DispersiveParams& params, const EffectiveTTModel& tt)
{
    std::ostringstream header;
    std::ostringstream row;
    row << std::setprecision(15);
    for (int x = 0; x < 2; ++x) {
        for (int i = 0; i < 2; ++i) {
            const std::string tag = std::string(1, "ab"[x]) + "_" + std::to_string(i);
            header << "lambda_" << tag << ",beta_" << tag << ",eta_" << tag << ',';
            row << params.lambda[x][i] << ',' << params.beta[x][i] << ',' << params.eta_disp[x][i] << ',';
        }
    }
    header << "g_eg_ghz,shifted_gap_a_ghz,shifted_gap_b_ghz\n";
    row << tt.g_eg << ',' << tt.shifted_gap(0) << ',' << tt.shifted_gap(1) << '\n';
    return header.str() + row.str();
}

}  // namespace cqed
