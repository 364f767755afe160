#pragma once

#include "cqed/common.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/rng.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace cqed {

/// Photodetection settings. dt in ns, rates in MHz.
struct DetectionConfig {
    double eta_a = 0.0;
    double eta_b = 0.0;
    double dt = 1.0;
    double gamma_a10 = 0.0;
    double gamma_b10 = 0.0;
    std::uint64_t seed = 1;

    /// Throws InvalidArgument for efficiencies outside [0, 1] and
    /// MarkovViolation unless Gamma dt < 0.01 for both transmons.
    void validate() const;
};

/// The nine outcome-resolved Kraus operators on {gg, ge, eg, ee}. Names follow
/// K_{a:b} with two digits per transmon: (detected photon, lost photon).
struct KrausSet {
    std::array<Matrix4c, 4> no_click;  // K00:00, K01:00, K00:01, K01:01
    std::array<Matrix4c, 2> click_a;   // K10:00, K10:01
    std::array<Matrix4c, 2> click_b;   // K00:10, K01:10
    Matrix4c click_both;               // K10:10

    std::vector<Matrix4c> all() const;
    /// sum K^dag K - 1 (zero for this model up to rounding).
    Matrix4c completeness_residual() const;
};

KrausSet build_kraus_set(const DetectionConfig& cfg);

/// exp(-i H dt) from the Hermitian eigendecomposition of H (GHz, dt in ns).
Matrix4c step_propagator(const Matrix4c& h, double dt);

enum class Outcome { None = 0, ClickA = 1, ClickB = 2, ClickBoth = 3 };
std::string_view to_string(Outcome o);

struct BranchUpdate {
    Matrix4c rho;
    double probability = 0.0;
};

/// rho' = U (sum_K K rho K^dag) U^dag / N over the branch's Kraus group.
/// Throws ZeroNorm when N < 1e-15.
BranchUpdate no_click_update(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& u);
BranchUpdate click_update_a(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& u);
BranchUpdate click_update_b(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& u);
BranchUpdate click_update_both(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& u);

/// Branch probabilities {N, N_a, N_b, N_ab} without the unitary (it does not
/// change traces).
std::array<double, 4> outcome_probabilities(const Matrix4c& rho, const KrausSet& kraus);

struct StepResult {
    Outcome outcome = Outcome::None;
    Matrix4c rho;
};

/// Draws one outcome from the renormalized branch probabilities using `u` in
/// [0, 1) and applies the matching update.
StepResult sample_step(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& unitary, double u);
StepResult sample_step(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& unitary, Philox& rng);

/// Outcome-averaged step, sum_K U K rho K^dag U^dag.
Matrix4c unconditional_step(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& u);

struct ClickEvent {
    std::int64_t trajectory = 0;
    double time = 0.0;  // ns, midpoint of the step
    Outcome detector = Outcome::ClickA;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Matrix4c> states;
    std::vector<ClickEvent> clicks;
    bool survived_postselection = true;
};

/// One trajectory; its random stream is (cfg.seed, trajectory_index).
TrajectoryRecord run_trajectory(const DetectionConfig& cfg, const Matrix4c& h, const Matrix4c& rho0,
                                const TimeGrid& grid, std::int64_t trajectory_index = 0);

struct EnsembleResult {
    std::vector<double> times;
    std::vector<Matrix4c> mean;
    std::vector<Eigen::Matrix4d> stderr_re;
    std::vector<Eigen::Matrix4d> stderr_im;
    /// Largest across-trajectory variance of any element at each time.
    std::vector<double> max_variance;
    /// Trajectories contributing to each sample.
    std::vector<std::int64_t> counts;
    /// Fraction of all trajectories without a click up to each sample time.
    std::vector<double> survival_fraction;
    std::vector<ClickEvent> clicks;
    std::int64_t n_traj = 0;
};

/// Mean over all trajectories. Trajectories run in fixed chunks whose
/// partial sums are merged in index order, so results do not depend on
/// `threads`.
EnsembleResult ensemble_average(const DetectionConfig& cfg, const Matrix4c& h, const Matrix4c& rho0,
                                const TimeGrid& grid, std::int64_t n_traj, int threads = 1);

/// Mean at each time over the trajectories with no click so far. Throws
/// EmptyEnsemble when no trajectory survives to the last sample.
EnsembleResult postselect_average(const DetectionConfig& cfg, const Matrix4c& h, const Matrix4c& rho0,
                                  const TimeGrid& grid, std::int64_t n_traj, int threads = 1);

/// CSV: time, Re/Im of the 16 mean elements, their standard errors, survival.
std::string ensemble_csv(const EnsembleResult& result);
/// CSV: trajectory_id, time_ns, detector.
std::string click_log_csv(const std::vector<ClickEvent>& clicks);

}  // namespace cqed
