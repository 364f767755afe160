#include "cqed/trajectories.hpp"

#include "cqed/csv.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace cqed {
namespace {

constexpr std::int64_t kChunkSize = 32;

using Matrix2c = Eigen::Matrix2cd;
using Array16d = Eigen::Array<double, 16, 1>;

struct QubitBlocks {
    Matrix2c keep;   // no emission
    Matrix2c loss;   // photon into the unmonitored channel
    Matrix2c click;  // photon into the detector
};

QubitBlocks qubit_blocks(double gamma_dt, double eta)
{
    QubitBlocks q;
    q.keep << 1.0, 0.0, 0.0, std::sqrt(1.0 - gamma_dt);
    const Matrix2c lower = (Matrix2c() << 0.0, 1.0, 0.0, 0.0).finished();
    q.loss = std::sqrt((1.0 - eta) * gamma_dt) * lower;
    q.click = std::sqrt(eta * gamma_dt) * lower;
    return q;
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Vector16c vec16(const Matrix4c& m) { return m.reshaped(16, 1); }
Matrix4c unvec4(const Vector16c& v) { return v.reshaped(4, 4); }

template <std::size_t N>
BranchUpdate apply_group(const Matrix4c& rho, const std::array<Matrix4c, N>& group, const Matrix4c& u,
                         const char* name)
{
    Matrix4c acc = Matrix4c::Zero();
    for (const Matrix4c& k : group) acc += k * rho * k.adjoint();
    const double norm = acc.trace().real();
    if (!(norm >= 1e-15)) {
        fail(ErrorKind::ZeroNorm, std::string(name) + ": outcome has zero probability");
    }
    return {u * acc * u.adjoint() / norm, norm};
}

/// Branch maps on column-stacked states, with trace functionals for the
/// branch probabilities.
struct BranchTables {
    std::array<Matrix16c, 4> maps;
    std::array<Vector16c, 4> effects;  // p = effects[o] . vec(rho)

    BranchTables(const KrausSet& kraus, const Matrix4c& u)
    {
        const Matrix16c uu = Eigen::kroneckerProduct(u.conjugate(), u).eval();
        auto build = [&](int o, const std::vector<Matrix4c>& group) {
            Matrix16c s = Matrix16c::Zero();
            Matrix4c e = Matrix4c::Zero();
            for (const Matrix4c& k : group) {
                s += Eigen::kroneckerProduct(k.conjugate(), k).eval();
                e += k.adjoint() * k;
            }
            maps[o] = uu * s;
            effects[o] = vec16(e.transpose());
        };
        build(0, {kraus.no_click.begin(), kraus.no_click.end()});
        build(1, {kraus.click_a.begin(), kraus.click_a.end()});
        build(2, {kraus.click_b.begin(), kraus.click_b.end()});
        build(3, {kraus.click_both});
    }
};

Outcome choose(const std::array<double, 4>& p, double u)
{
    const double total = p[0] + p[1] + p[2] + p[3];
    double target = u * total;
    for (int o = 0; o < 3; ++o) {
        if (target < p[o]) return static_cast<Outcome>(o);
        target -= p[o];
    }
    return p[3] > 0.0 ? Outcome::ClickBoth : Outcome::None;
}

/// Streaming mean and squared deviations (Chan et al. pairwise merge).
struct SampleStats {
    std::int64_t n = 0;
    Vector16c mean = Vector16c::Zero();
    Array16d m2_re = Array16d::Zero();
    Array16d m2_im = Array16d::Zero();

    void add(const Vector16c& x)
    {
        ++n;
        const Vector16c delta = x - mean;
        mean += delta / static_cast<double>(n);
        const Vector16c delta2 = x - mean;
        m2_re += delta.real().array() * delta2.real().array();
        m2_im += delta.imag().array() * delta2.imag().array();
    }

    void merge(const SampleStats& o)
    {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double nt = na + nb;
        const Vector16c delta = o.mean - mean;
        mean += delta * (nb / nt);
        m2_re += o.m2_re + delta.real().array().square() * (na * nb / nt);
        m2_im += o.m2_im + delta.imag().array().square() * (na * nb / nt);
        n += o.n;
    }
};

struct ChunkResult {
    std::vector<SampleStats> stats;
    std::vector<std::int64_t> survivors;
    std::vector<ClickEvent> clicks;
};

class TrajectoryEngine {
public:
    TrajectoryEngine(const DetectionConfig& cfg, const Matrix4c& h, const TimeGrid& grid)
        : cfg_(cfg), grid_(grid), tables_(build_kraus_set(cfg), step_propagator(h, grid.dt))
    {
        grid_.validate();
        require(std::abs(cfg.dt - grid.dt) <= 1e-12 * cfg.dt, ErrorKind::InvalidArgument,
                "trajectory engine: DetectionConfig.dt differs from the time grid step");
    }

    /// Runs trajectory `index`, calling visit(sample, state, alive) at each
    /// sample and record(click) for each click.
    template <typename Visit, typename Record>
    void run(const Matrix4c& rho0, std::int64_t index, Visit&& visit, Record&& record) const
    {
        Philox rng(cfg_.seed, static_cast<std::uint64_t>(index));
        Vector16c v = vec16(rho0);
        bool alive = true;
        visit(0, v, alive);
        for (int s = 1; s < grid_.samples; ++s) {
            for (int k = 0; k < grid_.steps_per_sample; ++k) {
                std::array<double, 4> p;
                for (int o = 0; o < 4; ++o) p[o] = std::max(0.0, tables_.effects[o].cwiseProduct(v).sum().real());
                const Outcome out = choose(p, rng.uniform());
                const int o = static_cast<int>(out);
                v = tables_.maps[o] * v / p[o];
                if (out != Outcome::None) {
                    alive = false;
                    const double step_index = static_cast<double>(s - 1) * grid_.steps_per_sample + k;
                    record(ClickEvent{index, (step_index + 0.5) * grid_.dt, out});
                }
            }
            visit(s, v, alive);
        }
    }

private:
    DetectionConfig cfg_;
    TimeGrid grid_;
    BranchTables tables_;
};

EnsembleResult run_ensemble(const DetectionConfig& cfg, const Matrix4c& h, const Matrix4c& rho0,
                            const TimeGrid& grid, std::int64_t n_traj, int threads, bool postselect)
{
    cfg.validate();
    require(n_traj >= 1, ErrorKind::InvalidArgument, "ensemble: n_traj must be >= 1");
    require(threads >= 1, ErrorKind::InvalidArgument, "ensemble: threads must be >= 1");
    const TrajectoryEngine engine(cfg, h, grid);
    const std::int64_t n_chunks = (n_traj + kChunkSize - 1) / kChunkSize;
    std::vector<ChunkResult> chunks(n_chunks);

    auto run_chunk = [&](std::int64_t c) {
        ChunkResult& r = chunks[c];
        r.stats.assign(grid.samples, SampleStats{});
        r.survivors.assign(grid.samples, 0);
        const std::int64_t end = std::min(n_traj, (c + 1) * kChunkSize);
        for (std::int64_t t = c * kChunkSize; t < end; ++t) {
            engine.run(
                rho0, t,
                [&](int s, const Vector16c& v, bool alive) {
                    if (alive) ++r.survivors[s];
                    if (alive || !postselect) r.stats[s].add(v);
                },
                [&](const ClickEvent& e) { r.clicks.push_back(e); });
        }
    };

    const int workers = static_cast<int>(std::min<std::int64_t>(threads, n_chunks));
    if (workers <= 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::int64_t> next{0};
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::int64_t c = next++; c < n_chunks; c = next++) run_chunk(c);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (std::thread& th : pool) th.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    EnsembleResult out;
    out.n_traj = n_traj;
    out.times = grid.times();
    std::vector<SampleStats> total(grid.samples);
    std::vector<std::int64_t> survivors(grid.samples, 0);
    for (const ChunkResult& r : chunks) {
        for (int s = 0; s < grid.samples; ++s) {
            total[s].merge(r.stats[s]);
            survivors[s] += r.survivors[s];
        }
        out.clicks.insert(out.clicks.end(), r.clicks.begin(), r.clicks.end());
    }
    if (postselect && survivors.back() == 0) {
        fail(ErrorKind::EmptyEnsemble, "postselect_average: no trajectory survives to the final time");
    }
    for (int s = 0; s < grid.samples; ++s) {
        const SampleStats& st = total[s];
        out.mean.push_back(unvec4(st.mean));
        out.counts.push_back(st.n);
        out.survival_fraction.push_back(static_cast<double>(survivors[s]) / static_cast<double>(n_traj));
        Eigen::Matrix4d se_re = Eigen::Matrix4d::Zero();
        Eigen::Matrix4d se_im = Eigen::Matrix4d::Zero();
        double max_var = 0.0;
        if (st.n > 1) {
            const double n = static_cast<double>(st.n);
            const Array16d var_re = st.m2_re / (n - 1.0);
            const Array16d var_im = st.m2_im / (n - 1.0);
            max_var = std::max(var_re.maxCoeff(), var_im.maxCoeff());
            se_re = (var_re / n).sqrt().matrix().reshaped(4, 4);
            se_im = (var_im / n).sqrt().matrix().reshaped(4, 4);
        }
        out.stderr_re.push_back(se_re);
        out.stderr_im.push_back(se_im);
        out.max_variance.push_back(max_var);
    }
    return out;
}

}  // namespace

void DetectionConfig::validate() const
{
    require(eta_a >= 0.0 && eta_a <= 1.0 && eta_b >= 0.0 && eta_b <= 1.0, ErrorKind::InvalidArgument,
            "DetectionConfig: efficiencies must lie in [0, 1]");
    require(dt > 0.0, ErrorKind::InvalidArgument, "DetectionConfig: dt must be positive");
    require(gamma_a10 >= 0.0 && gamma_b10 >= 0.0, ErrorKind::InvalidArgument,
            "DetectionConfig: rates must be nonnegative");
    const double worst = std::max(mhz_to_ghz(gamma_a10), mhz_to_ghz(gamma_b10)) * dt;
    if (!(worst < 0.01)) {
        std::ostringstream msg;
        msg << "Gamma dt = " << worst << " is not << 1 (limit 0.01)";
        fail(ErrorKind::MarkovViolation, msg.str());
    }
}

std::vector<Matrix4c> KrausSet::all() const
{
    std::vector<Matrix4c> out(no_click.begin(), no_click.end());
    out.insert(out.end(), click_a.begin(), click_a.end());
    out.insert(out.end(), click_b.begin(), click_b.end());
    out.push_back(click_both);
    return out;
}

Matrix4c KrausSet::completeness_residual() const
{
    Matrix4c sum = -Matrix4c::Identity();
    for (const Matrix4c& k : all()) sum += k.adjoint() * k;
    return sum;
}

KrausSet build_kraus_set(const DetectionConfig& cfg)
{
    cfg.validate();
    const QubitBlocks a = qubit_blocks(mhz_to_ghz(cfg.gamma_a10) * cfg.dt, cfg.eta_a);
    const QubitBlocks b = qubit_blocks(mhz_to_ghz(cfg.gamma_b10) * cfg.dt, cfg.eta_b);
    KrausSet k;
    k.no_click = {kron(a.keep, b.keep), kron(a.loss, b.keep), kron(a.keep, b.loss), kron(a.loss, b.loss)};
    k.click_a = {kron(a.click, b.keep), kron(a.click, b.loss)};
    k.click_b = {kron(a.keep, b.click), kron(a.loss, b.click)};
    k.click_both = kron(a.click, b.click);
    return k;
}

Matrix4c step_propagator(const Matrix4c& h, double dt)
{
    require((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-12, ErrorKind::InvalidArgument,
            "step_propagator: Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(h);
    const Eigen::Vector4cd phases =
        (-kI * dt * solver.eigenvalues().cast<cplx>()).array().exp().matrix();
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

std::string_view to_string(Outcome o)
{
    switch (o) {
    case Outcome::None: return "none";
    case Outcome::ClickA: return "a";
    case Outcome::ClickB: return "b";
    case Outcome::ClickBoth: return "both";
    }
    return "?";
}

BranchUpdate no_click_update(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& u)
{
    return apply_group(rho, kraus.no_click, u, "no_click_update");
}

BranchUpdate click_update_a(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& u)
{
    return apply_group(rho, kraus.click_a, u, "click_update_a");
}

BranchUpdate click_update_b(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& u)
{
    return apply_group(rho, kraus.click_b, u, "click_update_b");
}

BranchUpdate click_update_both(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& u)
{
    return apply_group(rho, std::array<Matrix4c, 1>{kraus.click_both}, u, "click_update_both");
}

std::array<double, 4> outcome_probabilities(const Matrix4c& rho, const KrausSet& kraus)
{
    auto prob = [&rho](const auto& group) {
        double p = 0.0;
        for (const Matrix4c& k : group) p += (k * rho * k.adjoint()).trace().real();
        return std::max(0.0, p);
    };
    return {prob(kraus.no_click), prob(kraus.click_a), prob(kraus.click_b),
            prob(std::array<Matrix4c, 1>{kraus.click_both})};
}

StepResult sample_step(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& unitary, double u)
{
    const Outcome out = choose(outcome_probabilities(rho, kraus), u);
    switch (out) {
    case Outcome::None: return {out, no_click_update(rho, kraus, unitary).rho};
    case Outcome::ClickA: return {out, click_update_a(rho, kraus, unitary).rho};
    case Outcome::ClickB: return {out, click_update_b(rho, kraus, unitary).rho};
    case Outcome::ClickBoth: return {out, click_update_both(rho, kraus, unitary).rho};
    }
    return {out, rho};
}

StepResult sample_step(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& unitary, Philox& rng)
{
    return sample_step(rho, kraus, unitary, rng.uniform());
}

Matrix4c unconditional_step(const Matrix4c& rho, const KrausSet& kraus, const Matrix4c& u)
{
    Matrix4c acc = Matrix4c::Zero();
    for (const Matrix4c& k : kraus.all()) acc += k * rho * k.adjoint();
    return u * acc * u.adjoint();
}

TrajectoryRecord run_trajectory(const DetectionConfig& cfg, const Matrix4c& h, const Matrix4c& rho0,
                                const TimeGrid& grid, std::int64_t trajectory_index)
{
    cfg.validate();
    const TrajectoryEngine engine(cfg, h, grid);
    TrajectoryRecord rec;
    rec.times = grid.times();
    engine.run(
        rho0, trajectory_index,
        [&](int, const Vector16c& v, bool) { rec.states.push_back(unvec4(v)); },
        [&](const ClickEvent& e) { rec.clicks.push_back(e); });
    rec.survived_postselection = rec.clicks.empty();
    return rec;
}

EnsembleResult ensemble_average(const DetectionConfig& cfg, const Matrix4c& h, const Matrix4c& rho0,
                                const TimeGrid& grid, std::int64_t n_traj, int threads)
{
    return run_ensemble(cfg, h, rho0, grid, n_traj, threads, false);
}

EnsembleResult postselect_average(const DetectionConfig& cfg, const Matrix4c& h, const Matrix4c& rho0,
                                  const TimeGrid& grid, std::int64_t n_traj, int threads)
{
    return run_ensemble(cfg, h, rho0, grid, n_traj, threads, true);
}

std::string ensemble_csv(const EnsembleResult& result)
{
    static const char* kLabels[4] = {"gg", "ge", "eg", "ee"};
    std::vector<std::string> header{"time_ns"};
    for (const char* part : {"re", "im"})
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) header.push_back(std::string(part) + "_" + kLabels[i] + "_" + kLabels[j]);
    for (const char* part : {"se_re", "se_im"})
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) header.push_back(std::string(part) + "_" + kLabels[i] + "_" + kLabels[j]);
    header.push_back("max_variance");
    header.push_back("count");
    header.push_back("survival_fraction");
    CsvWriter csv(header);
    for (std::size_t s = 0; s < result.times.size(); ++s) {
        std::vector<double> row{result.times[s]};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) row.push_back(result.mean[s](i, j).real());
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) row.push_back(result.mean[s](i, j).imag());
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) row.push_back(result.stderr_re[s](i, j));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) row.push_back(result.stderr_im[s](i, j));
        row.push_back(result.max_variance[s]);
        row.push_back(static_cast<double>(result.counts[s]));
        row.push_back(result.survival_fraction[s]);
        csv.add_row(row);
    }
    return csv.str();
}

std::string click_log_csv(const std::vector<ClickEvent>& clicks)
{
    CsvWriter csv({"trajectory_id", "time_ns", "detector"});
    for (const ClickEvent& c : clicks) {
        csv.add_row({std::to_string(c.trajectory), format_number(c.time), std::string(to_string(c.detector))}, {});
    }
    return csv.str();
}

}  // namespace cqed
