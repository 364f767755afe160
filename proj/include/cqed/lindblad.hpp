#pragma once

#include "cqed/common.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cqed {

/// Hermitian, unit-trace state over a labeled basis.
struct DensityMatrix {
    CMatrix data;
    std::vector<std::string> labels;

    /// Throws InvariantViolation naming the failed check and `time`.
    void check(double time, double trace_tol = 1e-8, double herm_tol = 1e-10,
               double positivity_tol = 1e-8) const;
    Eigen::Index index_of(const std::string& label) const;
};

/// Pure state |label><label| over `labels`.
DensityMatrix basis_state(const std::vector<std::string>& labels, const std::string& label);

/// Decay rates in MHz (inverse microseconds).
struct DecayRates {
    double gamma_a10 = 0.0;
    double gamma_b10 = 0.0;
    double gamma_a21 = 0.0;
    double gamma_b21 = 0.0;
    double kappa = 0.0;

    void validate() const;
};

/// Jump operator O with rate (per ns) entering as rate * D[O].
struct JumpOperator {
    CMatrix op;
    double rate = 0.0;
};

/// O rho O^dag - (1/2){O^dag O, rho}.
CMatrix dissipator(const CMatrix& op, const CMatrix& rho);

/// -i[H, rho] + sum rate D[O] rho.
CMatrix lindblad_rhs(const CMatrix& h, const std::vector<JumpOperator>& jumps, const CMatrix& rho);

/// Uniform time grid: samples at k * steps_per_sample * dt for k = 0..samples-1.
struct TimeGrid {
    double dt = 1.0;  // ns
    int steps_per_sample = 1;
    int samples = 1;

    void validate() const;
    double time(int sample) const { return sample * steps_per_sample * dt; }
    std::vector<double> times() const;
};

struct StateSeries {
    std::vector<double> times;  // ns
    std::vector<CMatrix> states;
};

/// Column-stacked superoperator of -i[H, .] + sum rate D[O].
CMatrix lindblad_superoperator(const CMatrix& h, const std::vector<JumpOperator>& jumps);

/// One fixed RK4 step of the linear ODE dv/dt = L v, as a matrix:
/// I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24.
CMatrix rk4_step_map(const CMatrix& generator, double dt);

/// k-fold power of a step map, i.e. k consecutive steps.
CMatrix step_map_power(const CMatrix& map, int k);

/// Fixed-step RK4 integration of the Lindblad equation (H in GHz, rates per
/// ns). For dimensions <= 8 the RK4 step is applied through its superoperator
/// matrix, which is the same map. Every sample is checked against the
/// DensityMatrix invariants; negative eigenvalues above -1e-8 are tolerated.
StateSeries evolve_master(const CMatrix& h, const std::vector<JumpOperator>& jumps,
                          const DensityMatrix& rho0, const TimeGrid& grid,
                          bool check_invariants = true);

/// H - omega * N: the frame rotating at `omega` per excitation. Exact for
/// number-conserving H with number-lowering jumps.
CMatrix rotating_frame(const CMatrix& h, const CMatrix& excitation_operator, double omega);

/// CSV with a time column (ns) and Re/Im of <i|rho|j> for each requested pair.
std::string populations_and_coherences(const StateSeries& series,
                                       const std::vector<std::string>& labels,
                                       const std::vector<std::pair<std::string, std::string>>& pairs);

}  // namespace cqed
