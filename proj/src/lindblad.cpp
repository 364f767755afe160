#include "cqed/lindblad.hpp"

#include "cqed/csv.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cqed {
namespace {

void invariant_failure(double time, const std::string& which, double value)
{
    std::ostringstream msg;
    msg << "t = " << time << " ns: " << which << " (" << value << ")";
    fail(ErrorKind::InvariantViolation, msg.str());
}

CMatrix vec(const CMatrix& m) { return m.reshaped(m.size(), 1); }

CMatrix unvec(const CMatrix& v, Eigen::Index n) { return v.reshaped(n, n); }

}  // namespace

void DensityMatrix::check(double time, double trace_tol, double herm_tol, double positivity_tol) const
{
    require(data.rows() == data.cols(), ErrorKind::DimensionMismatch, "DensityMatrix: not square");
    const double trace_err = std::abs(data.trace() - cplx(1.0, 0.0));
    if (!(trace_err <= trace_tol)) invariant_failure(time, "trace drift", trace_err);
    const double herm_err = (data - data.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm_err <= herm_tol)) invariant_failure(time, "Hermiticity", herm_err);
    const CMatrix sym = 0.5 * (data + data.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    if (!(min_eig >= -positivity_tol)) invariant_failure(time, "positivity", min_eig);
}

Eigen::Index DensityMatrix::index_of(const std::string& label) const
{
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) fail(ErrorKind::UnknownLabel, "no basis state " + label);
    return static_cast<Eigen::Index>(it - labels.begin());
}

DensityMatrix basis_state(const std::vector<std::string>& labels, const std::string& label)
{
    const auto n = static_cast<Eigen::Index>(labels.size());
    DensityMatrix rho{CMatrix::Zero(n, n), labels};
    const Eigen::Index k = rho.index_of(label);
    rho.data(k, k) = 1.0;
    return rho;
}

void DecayRates::validate() const
{
    for (double r : {gamma_a10, gamma_b10, gamma_a21, gamma_b21, kappa}) {
        require(r >= 0.0 && std::isfinite(r), ErrorKind::InvalidArgument,
                "DecayRates: rates must be finite and nonnegative");
    }
}

CMatrix dissipator(const CMatrix& op, const CMatrix& rho)
{
    require(op.rows() == rho.rows() && op.cols() == rho.cols() && op.rows() == op.cols(),
            ErrorKind::DimensionMismatch, "dissipator: operator and state dimensions differ");
    const CMatrix p = op.adjoint() * op;
    return op * rho * op.adjoint() - 0.5 * (p * rho + rho * p);
}

CMatrix lindblad_rhs(const CMatrix& h, const std::vector<JumpOperator>& jumps, const CMatrix& rho)
{
    require(h.rows() == rho.rows(), ErrorKind::DimensionMismatch, "lindblad_rhs: dimension mismatch");
    CMatrix out = -kI * (h * rho - rho * h);
    for (const JumpOperator& j : jumps) out += j.rate * dissipator(j.op, rho);
    return out;
}

void TimeGrid::validate() const
{
    require(dt > 0.0 && std::isfinite(dt), ErrorKind::InvalidArgument, "TimeGrid: dt must be positive");
    require(steps_per_sample >= 1, ErrorKind::InvalidArgument, "TimeGrid: steps_per_sample must be >= 1");
    require(samples >= 1, ErrorKind::InvalidArgument, "TimeGrid: samples must be >= 1");
}

std::vector<double> TimeGrid::times() const
{
    std::vector<double> t(samples);
    for (int k = 0; k < samples; ++k) t[k] = time(k);
    return t;
}

CMatrix lindblad_superoperator(const CMatrix& h, const std::vector<JumpOperator>& jumps)
{
    const Eigen::Index n = h.rows();
    const CMatrix id = CMatrix::Identity(n, n);
    // vec(A X B) = (B^T kron A) vec(X)
    CMatrix l = -kI * (Eigen::kroneckerProduct(id, h) - Eigen::kroneckerProduct(h.transpose(), id));
    for (const JumpOperator& j : jumps) {
        require(j.op.rows() == n, ErrorKind::DimensionMismatch, "lindblad_superoperator: jump dimension");
        const CMatrix p = j.op.adjoint() * j.op;
        l += j.rate * (Eigen::kroneckerProduct(j.op.conjugate(), j.op) -
                       0.5 * Eigen::kroneckerProduct(id, p) -
                       0.5 * Eigen::kroneckerProduct(p.transpose(), id));
    }
    return l;
}

CMatrix rk4_step_map(const CMatrix& generator, double dt)
{
    const Eigen::Index n = generator.rows();
    const CMatrix id = CMatrix::Identity(n, n);
    const CMatrix hl = dt * generator;
    return id + hl * (id + hl * (id + hl * (id + hl / 4.0) / 3.0) / 2.0);
}

CMatrix step_map_power(const CMatrix& map, int k)
{
    require(k >= 0, ErrorKind::InvalidArgument, "step_map_power: negative power");
    CMatrix result = CMatrix::Identity(map.rows(), map.cols());
    CMatrix base = map;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

StateSeries evolve_master(const CMatrix& h, const std::vector<JumpOperator>& jumps,
                          const DensityMatrix& rho0, const TimeGrid& grid, bool check_invariants)
{
    grid.validate();
    require(h.rows() == h.cols() && h.rows() == rho0.data.rows(), ErrorKind::DimensionMismatch,
            "evolve_master: Hamiltonian and state dimensions differ");
    rho0.check(0.0);
    const Eigen::Index n = h.rows();

    StateSeries out;
    out.times = grid.times();
    out.states.reserve(grid.samples);
    out.states.push_back(rho0.data);

    auto emit = [&](const CMatrix& rho, int sample) {
        if (check_invariants) DensityMatrix{rho, rho0.labels}.check(grid.time(sample));
        out.states.push_back(rho);
    };

    if (n <= 8) {
        const CMatrix sample_map =
            step_map_power(rk4_step_map(lindblad_superoperator(h, jumps), grid.dt), grid.steps_per_sample);
        CMatrix v = vec(rho0.data);
        for (int s = 1; s < grid.samples; ++s) {
            v = sample_map * v;
            emit(unvec(v, n), s);
        }
        return out;
    }

    const double dt = grid.dt;
    CMatrix rho = rho0.data;
    for (int s = 1; s < grid.samples; ++s) {
        for (int k = 0; k < grid.steps_per_sample; ++k) {
            const CMatrix k1 = lindblad_rhs(h, jumps, rho);
            const CMatrix k2 = lindblad_rhs(h, jumps, rho + 0.5 * dt * k1);
            const CMatrix k3 = lindblad_rhs(h, jumps, rho + 0.5 * dt * k2);
            const CMatrix k4 = lindblad_rhs(h, jumps, rho + dt * k3);
            rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        emit(rho, s);
    }
    return out;
}

CMatrix rotating_frame(const CMatrix& h, const CMatrix& excitation_operator, double omega)
{
    require(h.rows() == excitation_operator.rows(), ErrorKind::DimensionMismatch,
            "rotating_frame: dimension mismatch");
    return h - omega * excitation_operator;
}

std::string populations_and_coherences(const StateSeries& series,
                                       const std::vector<std::string>& labels,
                                       const std::vector<std::pair<std::string, std::string>>& pairs)
{
    auto index = [&labels](const std::string& l) {
        const auto it = std::find(labels.begin(), labels.end(), l);
        if (it == labels.end()) fail(ErrorKind::UnknownLabel, "no basis state " + l);
        return static_cast<Eigen::Index>(it - labels.begin());
    };
    std::vector<std::pair<Eigen::Index, Eigen::Index>> idx;
    std::vector<std::string> header{"time_ns"};
    for (const auto& [i, j] : pairs) {
        idx.emplace_back(index(i), index(j));
        header.push_back("re_" + i + "_" + j);
        header.push_back("im_" + i + "_" + j);
    }
    CsvWriter csv(header);
    for (std::size_t s = 0; s < series.states.size(); ++s) {
        std::vector<double> row{series.times[s]};
        for (const auto& [i, j] : idx) {
            row.push_back(series.states[s](i, j).real());
            row.push_back(series.states[s](i, j).imag());
        }
        csv.add_row(row);
    }
    return csv.str();
}

}  // namespace cqed
