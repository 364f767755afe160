#pragma once

#include "cqed/cli/config.hpp"
#include "cqed/composite_model.hpp"
#include "cqed/dispersive.hpp"
#include "cqed/liouvillian.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cqed::cli {

struct PipelineOptions {
    std::string output_dir;
    bool svg = true;
    /// Replaces both the single-transmon and the composite flux grids.
    std::optional<GridSpec> flux_grid;
};

/// Device resolved at its working point.
struct DeviceSetup {
    TransmonSpec spec_a;
    TransmonSpec spec_b;  // flux possibly retuned
    CompositeModel model;
    DispersiveParams params;
    EffectiveTTModel tt;
    double omega = 0.0;     // rotating-frame frequency, shifted g-e gap of a (GHz)
    double g_eg_mhz = 0.0;  // dispersive value unless overridden
};

DeviceSetup resolve_device(const RunConfig& config);

/// Uniform sampling grid from a step, a sample interval and a final time (ns).
TimeGrid make_grid(double dt_ns, double sample_every_ns, double t_final_ns);

/// Reduced two-transmon states of one tier with their log negativity.
struct TierSeries {
    std::vector<double> times;  // ns
    std::vector<Matrix4c> states;
    std::vector<double> negativity;
};

struct ThreeTierResult {
    TierSeries full;
    TierSeries dispersive;
    TierSeries effective;
    /// Largest |difference| of the four populations gg, ge, eg, ee.
    double max_population_diff = 0.0;  // full vs effective
    double max_population_diff_dispersive = 0.0;  // full vs dispersive
    double max_negativity_diff = 0.0;  // full vs effective
};

/// Full composite model, its dispersive transform and the effective
/// two-transmon model, all started in e0g and propagated in the frame rotating
/// at the shifted gap of transmon a. The composite tiers are restricted to
/// the sector with at most one excitation, which the dynamics never leaves.
ThreeTierResult compute_three_tiers(const RunConfig& config, const DeviceSetup& device);

/// Effective two-transmon Hamiltonian in the rotating frame with the
/// configured exchange coupling (GHz).
Matrix4c trajectory_hamiltonian(const DeviceSetup& device);

/// Slack added to 3 standard errors when comparing trajectory averages with
/// the master equation, covering the O(dt) step error of the trajectory
/// propagator. It matters where the ensemble is deterministic (SE = 0).
inline constexpr double kDiscretizationFloor = 5e-4;

/// Lab-frame two-transmon Hamiltonian with exchange g (MHz), GHz units.
Matrix4c lab_hamiltonian(const DeviceSetup& device, double g_eg_mhz);

/// Sample times (us) for the PT-phase runs: pt_periods periods of the first
/// oscillating coupling, pt_samples_per_period points per period.
std::vector<double> pt_times(const LiouvillianSection& section);

/// Broken phase: five e-folds of the fast mode relative to the slow one,
/// 5 / (2 sqrt(D)) in us; 0 in the unbroken phase.
double pt_transient(double gamma_a10, double gamma_b10, double g_eg);

/// Mean spacing of upward crossings of the midline (min + max) / 2; NaN with
/// fewer than two crossings.
double estimate_period(const std::vector<double>& times, const std::vector<double>& values);

/// Sign changes of successive differences at or after t_start. Differences
/// below `flat` in magnitude carry no sign.
int count_derivative_sign_changes(const std::vector<double>& times, const std::vector<double>& values,
                                  double t_start, double flat = 1e-12);

std::vector<std::string> cmd_spectrum(const RunConfig& config, const PipelineOptions& options);
std::vector<std::string> cmd_dynamics(const RunConfig& config, const PipelineOptions& options);
std::vector<std::string> cmd_trajectories(const RunConfig& config, const PipelineOptions& options);
std::vector<std::string> cmd_liouvillian(const RunConfig& config, const PipelineOptions& options);

/// Dispatches spectrum | dynamics | trajectories | liouvillian | all. Returns
/// the written file names (relative to the output directory).
std::vector<std::string> run_command(const std::string& command, const RunConfig& config,
                                     const PipelineOptions& options);

}  // namespace cqed::cli
