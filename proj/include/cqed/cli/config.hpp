#pragma once

#include "cqed/charge_basis.hpp"
#include "cqed/composite_model.hpp"
#include "cqed/lindblad.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cqed::cli {

/// Uniform grid description "start:stop:count" or a single value.
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;

    std::vector<double> values() const;
    static GridSpec parse(const std::string& text);
};

struct SpectrumSection {
    GridSpec single_flux{0.0, 1.0, 101};
    GridSpec tct_flux{0.25, 0.34, 181};
    double crossing_lo = 0.28;
    double crossing_hi = 0.31;
    double zoom_halfwidth = 0.004;
    int zoom_points = 81;
};

struct DynamicsSection {
    DecayRates rates{0.3, 0.3, 0.2, 0.2, 0.3};
    /// The composite tiers keep the cavity about 8 GHz above the rotating
    /// frame, so the step must resolve that phase.
    double dt_ns = 0.001;
    double t_final_us = 15.0;
    double sample_every_ns = 10.0;
};

struct TrajectorySection {
    double gamma_a10 = 0.3;
    double gamma_b10 = 0.2;
    std::vector<double> efficiencies{0.0, 1.0, 0.8};
    double dt_ns = 1.0;
    double t_final_us = 5.0;
    double sample_every_ns = 10.0;
    double me_dt_ns = 0.01;
    std::int64_t n_traj = 2000;
    std::string initial_state = "eg";
};

struct LiouvillianSection {
    double gamma_a10 = 0.3;
    double gamma_b10 = 0.2;
    GridSpec lab_sweep{0.0, 1.2, 121};
    GridSpec interaction_sweep{0.0, 0.06, 121};
    std::vector<double> efficiencies{0.0, 0.8, 1.0};
    std::vector<double> lab_couplings{0.2, 1.0};
    double lab_t_final_us = 20.0;
    double lab_sample_us = 0.02;
    std::vector<double> pt_couplings{0.03, 0.02};
    double pt_periods = 10.0;
    double pt_samples_per_period = 200.0;
    double invariance_coupling = 0.2;
};

/// Everything a CLI run needs. Energies GHz, rates MHz.
struct RunConfig {
    TransmonSpec transmon_a{0.5, 25.0, 0.3, 20};
    TransmonSpec transmon_b{0.9, 15.0, 0.3, 20};
    /// When unset, flux_b is retuned so the Lamb-shifted gaps coincide.
    bool retune_flux_b = true;
    CavitySpec cavity{15.0, 3};
    double zeta_a = 0.3;
    double zeta_b = 0.3;
    /// Replaces the computed G_eg in trajectory runs (MHz).
    std::optional<double> g_eg_override_mhz;

    SpectrumSection spectrum;
    DynamicsSection dynamics;
    TrajectorySection trajectories;
    LiouvillianSection liouvillian;

    std::uint64_t seed = 20240607;
    int threads = 1;
    std::string output_dir;

    /// Re-runs the physical validation of every module input; throws
    /// Error(Config) with the offending key.
    void validate() const;
};

/// Parses an INI file (sections [transmon_a], [transmon_b], [cavity],
/// [coupling], [spectrum], [dynamics], [trajectories], [liouvillian], [run]).
/// Unknown keys are rejected. Throws Error(Config).
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// The built-in defaults rendered in the INI schema.
std::string default_config_text();

}  // namespace cqed::cli
