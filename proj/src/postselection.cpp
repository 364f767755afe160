#include "cqed/postselection.hpp"

#include "cqed/csv.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <cmath>
#include <sstream>

namespace cqed {
namespace {

struct Channel {
    Matrix4c lower;
    Matrix4c projector;
    double gamma;  // per ns
    double eta;
};

std::array<Channel, 2> channels(const PostselectedModel& m)
{
    return {Channel{lowering_operator(0), excited_projector(0), mhz_to_ghz(m.gamma_a10), m.eta_a},
            Channel{lowering_operator(1), excited_projector(1), mhz_to_ghz(m.gamma_b10), m.eta_b}};
}

Matrix4c rk4(const PostselectedModel& model, const Matrix4c& rho, double dt,
             Matrix4c (*rhs)(const PostselectedModel&, const Matrix4c&))
{
    const Matrix4c k1 = rhs(model, rho);
    const Matrix4c k2 = rhs(model, rho + 0.5 * dt * k1);
    const Matrix4c k3 = rhs(model, rho + 0.5 * dt * k2);
    const Matrix4c k4 = rhs(model, rho + dt * k3);
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

void PostselectedModel::validate() const
{
    require(eta_a >= 0.0 && eta_a <= 1.0 && eta_b >= 0.0 && eta_b <= 1.0, ErrorKind::InvalidArgument,
            "PostselectedModel: efficiencies must lie in [0, 1]");
    require(gamma_a10 >= 0.0 && gamma_b10 >= 0.0, ErrorKind::InvalidArgument,
            "PostselectedModel: rates must be nonnegative");
    require((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() <= 1e-12, ErrorKind::InvalidArgument,
            "PostselectedModel: Hamiltonian is not Hermitian");
}

Matrix4c lowering_operator(int x)
{
    Matrix4c s = Matrix4c::Zero();
    if (x == 0) {
        s(0, 2) = 1.0;  // eg -> gg
        s(1, 3) = 1.0;  // ee -> ge
    } else {
        s(0, 1) = 1.0;  // ge -> gg
        s(2, 3) = 1.0;  // ee -> eg
    }
    return s;
}

Matrix4c excited_projector(int x)
{
    const Matrix4c s = lowering_operator(x);
    return s.adjoint() * s;
}

Matrix4c postselected_linear_rhs(const PostselectedModel& model, const Matrix4c& rho)
{
    Matrix4c out = -kI * (model.hamiltonian * rho - rho * model.hamiltonian);
    for (const Channel& c : channels(model)) {
        const Matrix4c anti = c.projector * rho + rho * c.projector;
        out += (1.0 - c.eta) * c.gamma * (c.lower * rho * c.lower.adjoint() - 0.5 * anti);
        out -= 0.5 * c.eta * c.gamma * anti;
    }
    return out;
}

Matrix4c postselected_rhs(const PostselectedModel& model, const Matrix4c& rho)
{
    Matrix4c out = postselected_linear_rhs(model, rho);
    for (const Channel& c : channels(model)) {
        out += c.eta * c.gamma * (c.projector * rho).trace().real() * rho;
    }
    return out;
}

Matrix16c postselected_superoperator(const PostselectedModel& model)
{
    const Matrix4c id = Matrix4c::Identity();
    const Matrix4c& h = model.hamiltonian;
    Matrix16c l = -kI * (Eigen::kroneckerProduct(id, h).eval() - Eigen::kroneckerProduct(h.transpose(), id).eval());
    for (const Channel& c : channels(model)) {
        const Matrix16c anti =
            Eigen::kroneckerProduct(id, c.projector).eval() + Eigen::kroneckerProduct(c.projector.transpose(), id).eval();
        l += (1.0 - c.eta) * c.gamma * Eigen::kroneckerProduct(c.lower.conjugate(), c.lower).eval();
        l -= 0.5 * c.gamma * anti;
    }
    return l;
}

PostselectedSeries evolve_postselected_linear(const PostselectedModel& model, const Matrix4c& rho0,
                                              const TimeGrid& grid)
{
    model.validate();
    grid.validate();
    const CMatrix step = rk4_step_map(CMatrix(postselected_superoperator(model)), grid.dt);
    const Matrix16c sample_map = step_map_power(step, grid.steps_per_sample);

    PostselectedSeries out;
    out.times = grid.times();
    Vector16c v = rho0.reshaped(16, 1);
    for (int s = 0; s < grid.samples; ++s) {
        if (s > 0) v = sample_map * v;
        const Matrix4c rho = v.reshaped(4, 4);
        const double norm = rho.trace().real();
        if (!(norm >= 1e-12)) {
            std::ostringstream msg;
            msg << "evolve_postselected_linear: trace " << norm << " at t = " << grid.time(s) << " ns";
            fail(ErrorKind::NormUnderflow, msg.str());
        }
        out.states.push_back(rho / norm);
        out.norms.push_back(norm);
    }
    return out;
}

PostselectedSeries evolve_postselected_nonlinear(const PostselectedModel& model, const Matrix4c& rho0,
                                                 const TimeGrid& grid)
{
    model.validate();
    grid.validate();
    PostselectedSeries out;
    out.times = grid.times();
    Matrix4c rho = rho0;
    out.states.push_back(rho);
    out.norms.push_back(rho.trace().real());
    for (int s = 1; s < grid.samples; ++s) {
        for (int k = 0; k < grid.steps_per_sample; ++k) rho = rk4(model, rho, grid.dt, postselected_rhs);
        out.states.push_back(rho);
        out.norms.push_back(rho.trace().real());
    }
    return out;
}

SmeRecord evolve_sme(const PostselectedModel& model, const Matrix4c& rho0, const TimeGrid& grid,
                     std::uint64_t seed, std::int64_t stream)
{
    model.validate();
    grid.validate();
    const auto ch = channels(model);
    for (const Channel& c : ch) {
        if (!(c.gamma * grid.dt < 0.01)) fail(ErrorKind::MarkovViolation, "evolve_sme: Gamma dt is not << 1");
    }
    Philox rng(seed, static_cast<std::uint64_t>(stream));
    SmeRecord rec;
    rec.times = grid.times();
    Matrix4c rho = rho0;
    rec.states.push_back(rho);
    for (int s = 1; s < grid.samples; ++s) {
        for (int k = 0; k < grid.steps_per_sample; ++k) {
            bool jumped = false;
            const double t_mid = ((s - 1) * grid.steps_per_sample + k + 0.5) * grid.dt;
            for (int x = 0; x < 2; ++x) {
                const Channel& c = ch[x];
                const double pe = (c.projector * rho).trace().real();
                const double p_jump = c.eta * c.gamma * pe * grid.dt;
                if (rng.uniform() < p_jump) {
                    rho = c.lower * rho * c.lower.adjoint() / pe;
                    jumped = true;
                    rec.jumps.push_back({stream, t_mid, x == 0 ? Outcome::ClickA : Outcome::ClickB});
                }
            }
            if (!jumped) rho = rk4(model, rho, grid.dt, postselected_rhs);
            rho /= rho.trace().real();
        }
        rec.states.push_back(rho);
    }
    return rec;
}

std::string postselected_csv(const PostselectedSeries& series)
{
    static const char* kLabels[4] = {"gg", "ge", "eg", "ee"};
    std::vector<std::string> header{"time_ns"};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            header.push_back(std::string("re_") + kLabels[i] + "_" + kLabels[j]);
            header.push_back(std::string("im_") + kLabels[i] + "_" + kLabels[j]);
        }
    header.push_back("survival_weight");
    CsvWriter csv(header);
    for (std::size_t s = 0; s < series.times.size(); ++s) {
        std::vector<double> row{series.times[s]};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                row.push_back(series.states[s](i, j).real());
                row.push_back(series.states[s](i, j).imag());
            }
        row.push_back(series.norms[s]);
        csv.add_row(row);
    }
    return csv.str();
}

}  // namespace cqed
