#include "cqed/cli/pipelines.hpp"

#include "cqed/cli/svg.hpp"
#include "cqed/csv.hpp"
#include "cqed/entanglement.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/postselection.hpp"
#include "cqed/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace cqed::cli {
namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kTwoQubitLabels{"gg", "ge", "eg", "ee"};

class OutputDir {
public:
    OutputDir(const PipelineOptions& options) : root_(options.output_dir), svg_(options.svg)
    {
        std::error_code ec;
        fs::create_directories(root_, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + root_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content)
    {
        std::ofstream out(root_ / name, std::ios::binary);
        out << content;
        if (!out) throw std::runtime_error("cannot write " + (root_ / name).string());
        written_.push_back(name);
    }

    void plot(const std::string& name, const PlotSpec& spec)
    {
        if (svg_) write(name, render_svg(spec));
    }

    std::vector<std::string> take() { return std::move(written_); }

private:
    fs::path root_;
    bool svg_;
    std::vector<std::string> written_;
};

/// "0.8" -> "0p8" for file names.
std::string tag(double value)
{
    std::string s = format_number(value);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

std::vector<double> column(const std::vector<Matrix4c>& states, int i, int j, bool imaginary = false)
{
    std::vector<double> out;
    out.reserve(states.size());
    for (const Matrix4c& r : states) out.push_back(imaginary ? r(i, j).imag() : r(i, j).real());
    return out;
}

std::vector<double> negativities(const std::vector<Matrix4c>& states)
{
    std::vector<double> out;
    out.reserve(states.size());
    for (const Matrix4c& r : states) out.push_back(log_negativity(r));
    return out;
}

std::vector<double> scaled(std::vector<double> v, double factor)
{
    for (double& x : v) x *= factor;
    return v;
}

std::vector<JumpOperator> composite_jumps(const CompositeModel& m, const DecayRates& rates)
{
    const auto dim = m.dimension();
    const int photons = m.cavity.fock_cutoff;
    CMatrix a10 = CMatrix::Zero(dim, dim), a21 = a10, b10 = a10, b21 = a10, cav = a10;
    for (Eigen::Index k = 0; k < dim; ++k) {
        const BasisLabel& l = m.basis_labels[k];
        if (l.level_a >= 1) {
            BasisLabel lower = l;
            --lower.level_a;
            (l.level_a == 1 ? a10 : a21)(m.index_of(lower), k) = 1.0;
        }
        if (l.level_b >= 1) {
            BasisLabel lower = l;
            --lower.level_b;
            (l.level_b == 1 ? b10 : b21)(m.index_of(lower), k) = 1.0;
        }
        if (l.photons >= 1 && l.photons <= photons) {
            BasisLabel lower = l;
            --lower.photons;
            cav(m.index_of(lower), k) = std::sqrt(static_cast<double>(l.photons));
        }
    }
    return {{a10, mhz_to_ghz(rates.gamma_a10)}, {a21, mhz_to_ghz(rates.gamma_a21)},
            {b10, mhz_to_ghz(rates.gamma_b10)}, {b21, mhz_to_ghz(rates.gamma_b21)},
            {cav, mhz_to_ghz(rates.kappa)}};
}

std::vector<JumpOperator> two_qubit_jumps(double gamma_a10, double gamma_b10)
{
    return {{CMatrix(lowering_operator(0)), mhz_to_ghz(gamma_a10)},
            {CMatrix(lowering_operator(1)), mhz_to_ghz(gamma_b10)}};
}

TierSeries composite_tier(const CompositeModel& m, const CMatrix& h_full, double omega,
                          const std::vector<JumpOperator>& jumps_full, const TimeGrid& grid)
{
    const SectorProjection sector = excitation_sectors(m.basis_labels, 1);
    const CMatrix h = sector.restrict(rotating_frame(h_full, m.excitation_operator(), omega));
    std::vector<JumpOperator> jumps;
    for (const JumpOperator& j : jumps_full) jumps.push_back({sector.restrict(j.op), j.rate});
    std::vector<std::string> labels;
    for (const BasisLabel& l : sector.labels) labels.push_back(l.str());

    const StateSeries series = evolve_master(h, jumps, basis_state(labels, "e0g"), grid);
    TierSeries out;
    out.times = series.times;
    for (const CMatrix& rho : series.states)
        out.states.push_back(reduced_transmon_state(sector.embed(rho, m.dimension()), m.basis_labels));
    out.negativity = negativities(out.states);
    return out;
}

double max_population_diff(const TierSeries& x, const TierSeries& y)
{
    double d = 0.0;
    for (std::size_t s = 0; s < x.states.size(); ++s)
        for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(x.states[s](k, k).real() - y.states[s](k, k).real()));
    return d;
}

Matrix4c initial_state(const std::string& label)
{
    const auto it = std::find(kTwoQubitLabels.begin(), kTwoQubitLabels.end(), label);
    if (it == kTwoQubitLabels.end()) fail(ErrorKind::UnknownLabel, "no two-transmon state " + label);
    const auto k = it - kTwoQubitLabels.begin();
    Matrix4c rho = Matrix4c::Zero();
    rho(k, k) = 1.0;
    return rho;
}

void add_spectrum_columns(std::vector<std::string>& header)
{
    for (const char* part : {"re", "im"})
        for (int k = 1; k <= 16; ++k) header.push_back(std::string(part) + "_lambda_" + std::to_string(k));
}

std::vector<double> spectrum_values(const SpectralDecomposition& d)
{
    std::vector<double> row;
    for (int k = 0; k < 16; ++k) row.push_back(d.eigenvalues(k).real());
    for (int k = 0; k < 16; ++k) row.push_back(d.eigenvalues(k).imag());
    return row;
}

}  // namespace

DeviceSetup resolve_device(const RunConfig& c)
{
    DeviceSetup d;
    d.spec_a = c.transmon_a;
    d.spec_b = c.transmon_b;
    if (c.retune_flux_b) {
        d.spec_b.flux = lamb_resonance_flux(c.transmon_a, c.transmon_b, c.cavity, c.zeta_a, c.zeta_b,
                                            c.spectrum.crossing_lo, c.spectrum.crossing_hi);
    }
    const TransmonEigensystem a = diagonalize_transmon(d.spec_a, 3);
    const TransmonEigensystem b = diagonalize_transmon(d.spec_b, 3);
    d.model = build_tct_hamiltonian(a, b, c.cavity, c.zeta_a, c.zeta_b);
    d.params = compute_dispersive_params(d.model);
    d.tt = build_h_d_tt(d.params, a, b);
    d.omega = d.tt.shifted_gap(0);
    d.g_eg_mhz = c.g_eg_override_mhz ? *c.g_eg_override_mhz : ghz_to_mhz(d.params.g_eg());
    return d;
}

TimeGrid make_grid(double dt_ns, double sample_every_ns, double t_final_ns)
{
    TimeGrid g;
    g.dt = dt_ns;
    g.steps_per_sample = static_cast<int>(std::lround(sample_every_ns / dt_ns));
    g.samples = static_cast<int>(std::lround(t_final_ns / sample_every_ns)) + 1;
    g.validate();
    return g;
}

ThreeTierResult compute_three_tiers(const RunConfig& c, const DeviceSetup& d)
{
    const DynamicsSection& dy = c.dynamics;
    const TimeGrid grid = make_grid(dy.dt_ns, dy.sample_every_ns, dy.t_final_us * 1e3);
    const auto jumps = composite_jumps(d.model, dy.rates);

    ThreeTierResult r;
    r.full = composite_tier(d.model, d.model.hamiltonian, d.omega, jumps, grid);
    r.dispersive = composite_tier(d.model, build_h_d_tct(d.model, d.params).total(), d.omega, jumps, grid);

    const StateSeries eff = evolve_master(CMatrix(d.tt.rotating_frame(d.omega)),
                                          two_qubit_jumps(dy.rates.gamma_a10, dy.rates.gamma_b10),
                                          basis_state(kTwoQubitLabels, "eg"), grid);
    r.effective.times = eff.times;
    for (const CMatrix& rho : eff.states) r.effective.states.push_back(rho);
    r.effective.negativity = negativities(r.effective.states);

    r.max_population_diff = max_population_diff(r.full, r.effective);
    r.max_population_diff_dispersive = max_population_diff(r.full, r.dispersive);
    for (std::size_t s = 0; s < r.full.negativity.size(); ++s)
        r.max_negativity_diff =
            std::max(r.max_negativity_diff, std::abs(r.full.negativity[s] - r.effective.negativity[s]));
    return r;
}

Matrix4c trajectory_hamiltonian(const DeviceSetup& d)
{
    Matrix4c h = d.tt.rotating_frame(d.omega);
    h(1, 2) = h(2, 1) = mhz_to_ghz(d.g_eg_mhz);
    return h;
}

Matrix4c lab_hamiltonian(const DeviceSetup& d, double g_eg_mhz)
{
    Matrix4c h = d.tt.hamiltonian;
    h.diagonal().array() -= d.tt.hamiltonian(0, 0);
    h(1, 2) = h(2, 1) = mhz_to_ghz(g_eg_mhz);
    return h;
}

std::vector<double> pt_times(const LiouvillianSection& s)
{
    double period = std::numeric_limits<double>::infinity();
    for (double g : s.pt_couplings) {
        period = oscillation_period(s.gamma_a10, s.gamma_b10, g);
        if (std::isfinite(period)) break;
    }
    // Without an oscillating coupling, span pt_periods decay times 1/(A + B).
    if (!std::isfinite(period)) period = 2.0 / (s.gamma_a10 + s.gamma_b10);
    const int per = static_cast<int>(std::lround(s.pt_samples_per_period));
    const int n = static_cast<int>(std::lround(s.pt_periods * per));
    std::vector<double> t(n + 1);
    for (int k = 0; k <= n; ++k) t[k] = period * k / per;
    return t;
}

double pt_transient(double gamma_a10, double gamma_b10, double g_eg)
{
    const double disc = ep_discriminant(gamma_a10, gamma_b10, g_eg);
    if (!(disc > 0.0)) return 0.0;
    return 5.0 / (2.0 * std::sqrt(disc));
}

double estimate_period(const std::vector<double>& times, const std::vector<double>& values)
{
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double mid = 0.5 * (*lo + *hi);
    std::vector<double> ups;
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (values[k - 1] < mid && values[k] >= mid) {
            const double f = (mid - values[k - 1]) / (values[k] - values[k - 1]);
            ups.push_back(times[k - 1] + f * (times[k] - times[k - 1]));
        }
    }
    if (ups.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);
}

int count_derivative_sign_changes(const std::vector<double>& times, const std::vector<double>& values,
                                  double t_start, double flat)
{
    int changes = 0;
    int last = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        if (times[k - 1] < t_start) continue;
        const double d = values[k] - values[k - 1];
        if (std::abs(d) <= flat) continue;
        const int sign = d > 0 ? 1 : -1;
        if (last != 0 && sign != last) ++changes;
        last = sign;
    }
    return changes;
}

std::vector<std::string> cmd_spectrum(const RunConfig& c, const PipelineOptions& options)
{
    OutputDir out(options);
    const SpectrumSection& sp = c.spectrum;

    // Fig. 2a: single transmon (b) levels over a full flux period.
    const std::vector<double> single = (options.flux_grid ? *options.flux_grid : sp.single_flux).values();
    const auto rows_a = flux_sweep_spectrum(c.transmon_b, single, 3);
    CsvWriter fig2a({"flux", "E0_ghz", "E1_ghz", "E2_ghz", "n01", "n12"});
    PlotSpec plot_a{"Transmon b levels", "flux (flux quanta)", "energy (GHz)", {}};
    for (int i = 0; i < 3; ++i) plot_a.series.push_back({"E" + std::to_string(i), {}, {}, false});
    for (const FluxSweepRow& r : rows_a) {
        const auto& e = r.system;
        fig2a.add_row({r.flux, e.energies[0], e.energies[1], e.energies[2], e.charge_elements[0],
                       e.charge_elements[1]});
        for (int i = 0; i < 3; ++i) {
            plot_a.series[i].x.push_back(r.flux);
            plot_a.series[i].y.push_back(e.energies[i]);
        }
    }
    out.write("fig2a.csv", fig2a.str());
    out.plot("fig2a.svg", plot_a);

    // Fig. 2b: zero-photon dressed levels of the composite model.
    const ModelFamily family = make_model_family(c.transmon_a, c.transmon_b, c.cavity, c.zeta_a, c.zeta_b);
    const std::vector<double> tct = (options.flux_grid ? *options.flux_grid : sp.tct_flux).values();
    const auto rows_b = tct_spectrum_sweep(family, tct, true);
    constexpr int kZeroPhotonLevels = 9;
    std::vector<std::string> header{"flux_b"};
    for (int k = 1; k <= kZeroPhotonLevels; ++k) header.push_back("label_" + std::to_string(k));
    for (int k = 1; k <= kZeroPhotonLevels; ++k) header.push_back("E" + std::to_string(k) + "_ghz");
    CsvWriter fig2b(header);
    PlotSpec plot_b{"Zero-photon dressed levels", "flux_b (flux quanta)", "energy (GHz)", {}};
    for (int k = 0; k < kZeroPhotonLevels; ++k) plot_b.series.push_back({"level " + std::to_string(k + 1), {}, {}, false});
    for (const SpectrumRow& r : rows_b) {
        std::vector<std::string> text{format_number(r.flux_b)};
        std::vector<double> values;
        for (int k = 0; k < kZeroPhotonLevels; ++k) {
            const bool have = k < static_cast<int>(r.eigenvalues.size());
            text.push_back(have ? r.dominant[k].str() : "");
            values.push_back(have ? r.eigenvalues[k] : std::numeric_limits<double>::quiet_NaN());
            plot_b.series[k].x.push_back(r.flux_b);
            plot_b.series[k].y.push_back(values.back());
        }
        fig2b.add_row(text, values);
    }
    out.write("fig2b.csv", fig2b.str());
    out.plot("fig2b.svg", plot_b);

    // Fig. 2c: zoom on the avoided crossing.
    const AvoidedCrossing x = find_avoided_crossing(family, sp.crossing_lo, sp.crossing_hi);
    const CompositeModel at_crossing = family(x.flux);
    const DispersiveParams params = compute_dispersive_params(at_crossing);
    const TransmonEigensystem sys_a = diagonalize_transmon(c.transmon_a, 3);
    TransmonSpec spec_b = c.transmon_b;
    spec_b.flux = x.flux;
    const EffectiveTTModel tt = build_h_d_tt(params, sys_a, diagonalize_transmon(spec_b, 3));

    auto branches = [&family](double f) {
        const CompositeModel m = family(f);
        std::vector<Eigen::Index> block;
        for (Eigen::Index i = 0; i < m.dimension(); ++i)
            if (m.basis_labels[i].excitations() == 1) block.push_back(i);
        const auto n = static_cast<Eigen::Index>(block.size());
        CMatrix sub(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = m.hamiltonian(block[i], block[j]);
        const Eigen::SelfAdjointEigenSolver<CMatrix> solver(sub, Eigen::EigenvaluesOnly);
        return std::pair{solver.eigenvalues()(0), solver.eigenvalues()(1)};
    };
    std::vector<double> zoom;
    for (int k = 0; k < sp.zoom_points; ++k)
        zoom.push_back(x.flux - sp.zoom_halfwidth + 2.0 * sp.zoom_halfwidth * k / (sp.zoom_points - 1));
    zoom.push_back(x.flux);
    std::sort(zoom.begin(), zoom.end());
    zoom.erase(std::unique(zoom.begin(), zoom.end()), zoom.end());

    CsvWriter fig2c({"flux_b", "lower_ghz", "upper_ghz", "gap_ghz", "is_crossing"});
    PlotSpec plot_c{"Avoided crossing at flux_b = " + format_number(x.flux), "flux_b (flux quanta)", "energy (GHz)",
                    {{"lower", {}, {}, false}, {"upper", {}, {}, false}}};
    for (double f : zoom) {
        const auto [lower, upper] = branches(f);
        fig2c.add_row({f, lower, upper, upper - lower, f == x.flux ? 1.0 : 0.0});
        plot_c.series[0].x.push_back(f);
        plot_c.series[0].y.push_back(lower);
        plot_c.series[1].x.push_back(f);
        plot_c.series[1].y.push_back(upper);
    }
    out.write("fig2c.csv", fig2c.str());
    out.plot("fig2c.svg", plot_c);

    CsvWriter crossing({"crossing_flux", "gap_ghz", "g_eg_ghz", "two_g_eg_ghz", "relative_gap_error"});
    const double two_g = 2.0 * std::abs(params.g_eg());
    crossing.add_row({x.flux, x.gap, params.g_eg(), two_g, std::abs(x.gap - two_g) / two_g});
    out.write("crossing.csv", crossing.str());
    out.write("model_summary.txt", model_summary_text(params, tt));
    out.write("model_summary.csv", model_summary_csv(params, tt));
    return out.take();
}

std::vector<std::string> cmd_dynamics(const RunConfig& c, const PipelineOptions& options)
{
    OutputDir out(options);
    const DeviceSetup d = resolve_device(c);
    const ThreeTierResult r = compute_three_tiers(c, d);

    const std::vector<std::string> header{"time_ns", "p_gg", "p_ge", "p_eg", "p_ee",
                                          "re_eg_ge", "im_eg_ge", "log_negativity"};
    auto write_tier = [&](const std::string& name, const TierSeries& t) {
        CsvWriter csv(header);
        for (std::size_t s = 0; s < t.times.size(); ++s) {
            const Matrix4c& rho = t.states[s];
            csv.add_row({t.times[s], rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(), rho(3, 3).real(),
                         rho(2, 1).real(), rho(2, 1).imag(), t.negativity[s]});
        }
        out.write(name, csv.str());
    };
    write_tier("fig3_full.csv", r.full);
    write_tier("fig3_dispersive.csv", r.dispersive);
    write_tier("fig3_effective.csv", r.effective);

    CsvWriter summary({"flux_b", "omega_ghz", "g_eg_mhz", "max_pop_diff_full_effective",
                       "max_pop_diff_full_dispersive", "max_negativity_diff_full_effective"});
    summary.add_row({d.spec_b.flux, d.omega, ghz_to_mhz(d.params.g_eg()), r.max_population_diff,
                     r.max_population_diff_dispersive, r.max_negativity_diff});
    out.write("fig3_summary.csv", summary.str());

    const std::vector<double> t_us = scaled(r.full.times, 1e-3);
    PlotSpec pops{"Populations, three tiers", "time (us)", "population", {}};
    for (auto [tier, name, dashed] : {std::tuple{&r.full, "full", false}, std::tuple{&r.dispersive, "dispersive", true},
                                      std::tuple{&r.effective, "effective", true}}) {
        pops.series.push_back({std::string("eg ") + name, t_us, column(tier->states, 2, 2), dashed});
        pops.series.push_back({std::string("ge ") + name, t_us, column(tier->states, 1, 1), dashed});
    }
    out.plot("fig3_populations.svg", pops);
    out.plot("fig3_negativity.svg", {"Log negativity", "time (us)", "E_N",
                                     {{"full", t_us, r.full.negativity, false},
                                      {"dispersive", t_us, r.dispersive.negativity, true},
                                      {"effective", t_us, r.effective.negativity, true}}});
    return out.take();
}

std::vector<std::string> cmd_trajectories(const RunConfig& c, const PipelineOptions& options)
{
    OutputDir out(options);
    const TrajectorySection& tr = c.trajectories;
    const DeviceSetup d = resolve_device(c);
    const Matrix4c h = trajectory_hamiltonian(d);
    const Matrix4c rho0 = initial_state(tr.initial_state);
    const double t_final_ns = tr.t_final_us * 1e3;
    const TimeGrid grid = make_grid(tr.dt_ns, tr.sample_every_ns, t_final_ns);
    const TimeGrid me_grid = make_grid(tr.me_dt_ns, tr.sample_every_ns, t_final_ns);

    // Unmonitored reference: the reduced master equation.
    const StateSeries me = evolve_master(CMatrix(h), two_qubit_jumps(tr.gamma_a10, tr.gamma_b10),
                                         basis_state(kTwoQubitLabels, tr.initial_state), me_grid);
    std::vector<Matrix4c> me_states(me.states.begin(), me.states.end());
    const std::vector<double> t_us = scaled(grid.times(), 1e-3);

    struct Tracked {
        const char* name;
        int i;
        int j;
        bool imaginary;
    };
    const Tracked tracked[] = {{"p_gg", 0, 0, false}, {"p_ge", 1, 1, false},    {"p_eg", 2, 2, false},
                               {"p_ee", 3, 3, false}, {"re_eg_ge", 2, 1, false}, {"im_eg_ge", 2, 1, true}};

    std::vector<std::string> fig5_header{"time_ns", "unmonitored"};
    std::vector<std::vector<double>> fig5_cols{negativities(me_states)};
    PlotSpec fig5_plot{"Log negativity under postselection", "time (us)", "E_N",
                       {{"unmonitored", t_us, fig5_cols[0], false}}};

    for (double eta : tr.efficiencies) {
        DetectionConfig cfg;
        cfg.eta_a = cfg.eta_b = eta;
        cfg.dt = tr.dt_ns;
        cfg.gamma_a10 = tr.gamma_a10;
        cfg.gamma_b10 = tr.gamma_b10;
        cfg.seed = c.seed;

        const bool monitored = eta > 0.0;
        const EnsembleResult ens = monitored ? postselect_average(cfg, h, rho0, grid, tr.n_traj, c.threads)
                                             : ensemble_average(cfg, h, rho0, grid, tr.n_traj, c.threads);
        std::vector<Matrix4c> ref = me_states;
        std::vector<double> ref_survival(ref.size(), 1.0);
        if (monitored) {
            PostselectedModel pm{h, tr.gamma_a10, tr.gamma_b10, eta, eta};
            const PostselectedSeries lin = evolve_postselected_linear(pm, rho0, me_grid);
            ref = lin.states;
            ref_survival = lin.norms;
        }

        std::vector<std::string> header{"time_ns"};
        for (const Tracked& t : tracked) {
            header.push_back(std::string(t.name) + "_traj");
            header.push_back(std::string(t.name) + "_se");
            header.push_back(std::string(t.name) + "_me");
        }
        for (const char* extra : {"max_variance", "survival_traj", "survival_me", "max_excess_over_3se", "agree"})
            header.push_back(extra);
        CsvWriter overlay(header);
        for (std::size_t s = 0; s < ens.times.size(); ++s) {
            std::vector<double> row{ens.times[s]};
            for (const Tracked& t : tracked) {
                row.push_back(t.imaginary ? ens.mean[s](t.i, t.j).imag() : ens.mean[s](t.i, t.j).real());
                row.push_back(t.imaginary ? ens.stderr_im[s](t.i, t.j) : ens.stderr_re[s](t.i, t.j));
                row.push_back(t.imaginary ? ref[s](t.i, t.j).imag() : ref[s](t.i, t.j).real());
            }
            double excess = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    const cplx diff = ens.mean[s](i, j) - ref[s](i, j);
                    excess = std::max({excess, std::abs(diff.real()) - 3.0 * ens.stderr_re[s](i, j),
                                       std::abs(diff.imag()) - 3.0 * ens.stderr_im[s](i, j)});
                }
            row.push_back(ens.max_variance[s]);
            row.push_back(ens.survival_fraction[s]);
            row.push_back(ref_survival[s]);
            row.push_back(excess);
            row.push_back(excess <= kDiscretizationFloor ? 1.0 : 0.0);
            overlay.add_row(row);
        }
        const std::string stem = "fig4_eta" + tag(eta);
        out.write(stem + ".csv", overlay.str());
        out.write(stem + "_ensemble.csv", ensemble_csv(ens));
        out.write(stem + "_clicks.csv", click_log_csv(ens.clicks));
        out.plot(stem + ".svg", {"Trajectory average vs master equation, eta = " + format_number(eta), "time (us)",
                                 "population",
                                 {{"eg trajectories", t_us, column(ens.mean, 2, 2), false},
                                  {"eg reference", t_us, column(ref, 2, 2), true},
                                  {"ge trajectories", t_us, column(ens.mean, 1, 1), false},
                                  {"ge reference", t_us, column(ref, 1, 1), true}}});

        if (monitored) {
            fig5_header.push_back("postselected_eta" + tag(eta));
            fig5_cols.push_back(negativities(ref));
            fig5_plot.series.push_back({"eta = " + format_number(eta), t_us, fig5_cols.back(), false});
            fig5_header.push_back("trajectories_eta" + tag(eta));
            fig5_cols.push_back(negativities(ens.mean));
        }
    }

    CsvWriter fig5(fig5_header);
    for (std::size_t s = 0; s < me.times.size(); ++s) {
        std::vector<double> row{me.times[s]};
        for (const auto& col : fig5_cols) row.push_back(col[s]);
        fig5.add_row(row);
    }
    out.write("fig5.csv", fig5.str());
    out.plot("fig5.svg", fig5_plot);
    return out.take();
}

std::vector<std::string> cmd_liouvillian(const RunConfig& c, const PipelineOptions& options)
{
    OutputDir out(options);
    const LiouvillianSection& li = c.liouvillian;
    const double ga = li.gamma_a10;
    const double gb = li.gamma_b10;
    const double eta_max = *std::max_element(li.efficiencies.begin(), li.efficiencies.end());
    const Matrix4c eg = initial_state("eg");

    // Eigenvalue sweeps over the coupling.
    auto sweep = [&](const std::string& name, const GridSpec& grid, Frame frame, const DeviceSetup* device) {
        std::vector<std::string> header{"g_mhz"};
        add_spectrum_columns(header);
        for (const char* extra : {"condition_number", "discriminant", "sign_change"}) header.push_back(extra);
        CsvWriter csv(header);
        PlotSpec plot{"Liouvillian spectrum (" + std::string(to_string(frame)) + " frame)", "G_eg (MHz)",
                      "Re lambda (MHz)", {}};
        for (int k = 0; k < 16; ++k) plot.series.push_back({"lambda " + std::to_string(k + 1), {}, {}, false});
        double previous = std::numeric_limits<double>::quiet_NaN();
        for (double g : grid.values()) {
            PostselectedModel m = interaction_model(ga, gb, eta_max, eta_max, g);
            if (device) m.hamiltonian = lab_hamiltonian(*device, g);
            const SpectralDecomposition dec = eigendecompose(build_liouvillian(m, frame));
            const double disc = ep_discriminant(ga, gb, g);
            const bool change = disc == 0.0 || (!std::isnan(previous) && (disc > 0) != (previous > 0));
            previous = disc;
            std::vector<double> row{g};
            const auto values = spectrum_values(dec);
            row.insert(row.end(), values.begin(), values.end());
            row.push_back(dec.condition_number);
            row.push_back(disc);
            row.push_back(change ? 1.0 : 0.0);
            csv.add_row(row);
            for (int k = 0; k < 16; ++k) {
                plot.series[k].x.push_back(g);
                plot.series[k].y.push_back(dec.eigenvalues(k).real());
            }
        }
        out.write(name + ".csv", csv.str());
        out.plot(name + ".svg", plot);
    };
    const DeviceSetup device = resolve_device(c);
    sweep("fig6_spectrum_lab", li.lab_sweep, Frame::Lab, &device);
    sweep("fig6_spectrum_int", li.interaction_sweep, Frame::Interaction, nullptr);

    // Efficiency independence of the spectrum, and the stationary weight C_1.
    std::set<double> etas(li.efficiencies.begin(), li.efficiencies.end());
    etas.insert({0.0, 0.5, 1.0});
    {
        std::vector<std::string> header{"eta"};
        add_spectrum_columns(header);
        header.push_back("re_c1");
        header.push_back("im_c1");
        CsvWriter csv(header);
        for (double eta : etas) {
            const SpectralDecomposition dec = eigendecompose(
                build_liouvillian(interaction_model(ga, gb, eta, eta, li.invariance_coupling), Frame::Interaction));
            const cplx c1 = dec.coefficients(eg)(0);
            std::vector<double> row{eta};
            const auto values = spectrum_values(dec);
            row.insert(row.end(), values.begin(), values.end());
            row.push_back(c1.real());
            row.push_back(c1.imag());
            csv.add_row(row);
        }
        out.write("fig6_eta_invariance.csv", csv.str());
    }

    // Modal coefficients for the initial state eg.
    {
        CsvWriter csv({"eta", "mode", "re_lambda", "im_lambda", "re_coefficient", "im_coefficient"});
        for (double eta : li.efficiencies) {
            const SpectralDecomposition dec = eigendecompose(
                build_liouvillian(interaction_model(ga, gb, eta, eta, li.invariance_coupling), Frame::Interaction));
            const Vector16c coeff = dec.coefficients(eg);
            for (int k = 0; k < 16; ++k)
                csv.add_row({eta, static_cast<double>(k + 1), dec.eigenvalues(k).real(), dec.eigenvalues(k).imag(),
                             coeff(k).real(), coeff(k).imag()});
        }
        out.write("fig6_coefficients.csv", csv.str());
    }

    // Lab-frame dynamics.
    {
        CsvWriter csv({"method", "g_mhz", "eta", "time_us", "p_gg", "p_ge", "p_eg", "p_ee", "trace"});
        std::vector<double> times;
        const int n = static_cast<int>(std::lround(li.lab_t_final_us / li.lab_sample_us));
        for (int k = 0; k <= n; ++k) times.push_back(k * li.lab_sample_us);
        PlotSpec plot{"Normalized population of eg (lab frame)", "time (us)", "population", {}};
        for (double g : li.lab_couplings) {
            for (double eta : li.efficiencies) {
                PostselectedModel m = interaction_model(ga, gb, eta, eta, g);
                m.hamiltonian = lab_hamiltonian(device, g);
                const LiouvillianMatrix l = build_liouvillian(m, Frame::Lab);
                const ReconstructedSeries r = reconstruct_evolution(l, eigendecompose(l), eg, times);
                for (std::size_t s = 0; s < times.size(); ++s) {
                    const Matrix4c& rho = r.states[s];
                    csv.add_row({std::string(to_string(r.method))},
                                {g, eta, times[s], rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(),
                                 rho(3, 3).real(), r.traces[s]});
                }
                plot.series.push_back({"G = " + format_number(g) + ", eta = " + format_number(eta), times,
                                       column(r.states, 2, 2), eta < 1.0});
            }
        }
        out.write("fig6_dynamics.csv", csv.str());
        out.plot("fig6_dynamics.svg", plot);
    }

    // PT-symmetric and broken phases at unit efficiency.
    {
        const std::vector<double> times = pt_times(li);
        const double t_final = times.back();
        CsvWriter summary({"g_mhz", "discriminant", "phase", "analytic_period_us", "measured_period_us",
                           "first_peak_to_peak", "last_peak_to_peak", "transient_us",
                           "derivative_sign_changes_after_transient"});
        for (double g : li.pt_couplings) {
            const LiouvillianMatrix l = build_liouvillian(interaction_model(ga, gb, 1.0, 1.0, g), Frame::Interaction);
            const ReconstructedSeries r = reconstruct_evolution(l, eigendecompose(l), eg, times);
            CsvWriter csv({"method", "time_us", "p_gg", "p_ge", "p_eg", "p_ee", "re_eg_ge", "im_eg_ge", "trace"});
            for (std::size_t s = 0; s < times.size(); ++s) {
                const Matrix4c& rho = r.states[s];
                csv.add_row({std::string(to_string(r.method))},
                            {times[s], rho(0, 0).real(), rho(1, 1).real(), rho(2, 2).real(), rho(3, 3).real(),
                             rho(2, 1).real(), rho(2, 1).imag(), r.traces[s]});
            }
            const std::string stem = "fig7_G" + format_number(g);
            out.write(stem + ".csv", csv.str());
            const std::vector<double> p_eg = column(r.states, 2, 2);
            out.plot(stem + ".svg", {"Normalized populations, G = " + format_number(g) + " MHz", "time (us)",
                                     "population",
                                     {{"eg", times, p_eg, false}, {"ge", times, column(r.states, 1, 1), true}}});

            const double disc = ep_discriminant(ga, gb, g);
            const double period = oscillation_period(ga, gb, g);
            // Peak-to-peak of the first and last analytic period inside the run.
            auto p2p = [&](double from, double to) {
                double lo = std::numeric_limits<double>::infinity(), hi = -lo;
                for (std::size_t s = 0; s < times.size(); ++s)
                    if (times[s] >= from && times[s] <= to) lo = std::min(lo, p_eg[s]), hi = std::max(hi, p_eg[s]);
                return hi - lo;
            };
            const double nan = std::numeric_limits<double>::quiet_NaN();
            const bool oscillating = std::isfinite(period) && period <= t_final;
            const double transient = pt_transient(ga, gb, g);
            summary.add_row({format_number(g), format_number(disc), disc < 0 ? "unbroken" : "broken"},
                            {period, estimate_period(times, p_eg), oscillating ? p2p(0.0, period) : nan,
                             oscillating ? p2p(t_final - period, t_final) : nan, transient,
                             static_cast<double>(count_derivative_sign_changes(times, p_eg, transient))});
        }
        out.write("fig7_summary.csv", summary.str());
    }

    CsvWriter ep({"ep_location_mhz", "discriminant_at_ep", "condition_number_at_ep"});
    const double g_ep = ep_location(ga, gb);
    const SpectralDecomposition at_ep =
        eigendecompose(build_liouvillian(interaction_model(ga, gb, eta_max, eta_max, g_ep), Frame::Interaction));
    ep.add_row({g_ep, ep_discriminant(ga, gb, g_ep), at_ep.condition_number});
    out.write("fig6_ep.csv", ep.str());
    return out.take();
}

std::vector<std::string> run_command(const std::string& command, const RunConfig& config,
                                     const PipelineOptions& options)
{
    if (command == "spectrum") return cmd_spectrum(config, options);
    if (command == "dynamics") return cmd_dynamics(config, options);
    if (command == "trajectories") return cmd_trajectories(config, options);
    if (command == "liouvillian") return cmd_liouvillian(config, options);
    if (command == "all") {
        std::vector<std::string> files;
        for (const char* sub : {"spectrum", "dynamics", "trajectories", "liouvillian"}) {
            const auto part = run_command(sub, config, options);
            files.insert(files.end(), part.begin(), part.end());
        }
        return files;
    }
    fail(ErrorKind::Config, "unknown command " + command);
}

}  // namespace cqed::cli
