#include "cqed/cli/config.hpp"

#include "cqed/csv.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cqed::cli {
namespace {

namespace pt = boost::property_tree;

[[noreturn]] void config_error(const std::string& key, const std::string& what)
{
    fail(ErrorKind::Config, key + ": " + what);
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& key)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) config_error(key, "not a number: '" + t + "'");
    return v;
}

long long to_integer(const std::string& text, const std::string& key)
{
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) config_error(key, "not an integer: '" + t + "'");
    return v;
}

std::vector<double> to_list(const std::string& text, const std::string& key)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item, key));
    if (out.empty()) config_error(key, "empty list");
    return out;
}

std::string render_list(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
    return s;
}

std::string render_grid(const GridSpec& g)
{
    return format_number(g.start) + ":" + format_number(g.stop) + ":" + std::to_string(g.count);
}

using Setter = std::function<void(const std::string&, const std::string&)>;
using Schema = std::map<std::string, std::map<std::string, Setter>>;

Setter real(double& target)
{
    return [&target](const std::string& v, const std::string& key) { target = to_double(v, key); };
}

Setter integer(int& target)
{
    return [&target](const std::string& v, const std::string& key) { target = static_cast<int>(to_integer(v, key)); };
}

Setter list(std::vector<double>& target)
{
    return [&target](const std::string& v, const std::string& key) { target = to_list(v, key); };
}

Setter grid(GridSpec& target)
{
    return [&target](const std::string& v, const std::string& key) {
        try {
            target = GridSpec::parse(v);
        } catch (const Error& e) {
            config_error(key, e.what());
        }
    };
}

Schema schema(RunConfig& c)
{
    Schema s;
    for (auto [name, spec] : {std::pair{"transmon_a", &c.transmon_a}, std::pair{"transmon_b", &c.transmon_b}}) {
        s[name]["ec"] = real(spec->ec);
        s[name]["ej_sigma"] = real(spec->ej_sigma);
        s[name]["charge_cutoff"] = integer(spec->charge_cutoff);
    }
    s["transmon_a"]["flux"] = real(c.transmon_a.flux);
    s["transmon_b"]["flux"] = [&c](const std::string& v, const std::string& key) {
        if (trim(v) == "auto") {
            c.retune_flux_b = true;
        } else {
            c.retune_flux_b = false;
            c.transmon_b.flux = to_double(v, key);
        }
    };
    s["cavity"]["frequency"] = real(c.cavity.frequency);
    s["cavity"]["fock_cutoff"] = integer(c.cavity.fock_cutoff);
    s["coupling"]["zeta_a"] = real(c.zeta_a);
    s["coupling"]["zeta_b"] = real(c.zeta_b);
    s["coupling"]["g_eg_mhz"] = [&c](const std::string& v, const std::string& key) {
        if (trim(v) == "auto") c.g_eg_override_mhz.reset();
        else c.g_eg_override_mhz = to_double(v, key);
    };

    SpectrumSection& sp = c.spectrum;
    s["spectrum"]["single_flux"] = grid(sp.single_flux);
    s["spectrum"]["tct_flux"] = grid(sp.tct_flux);
    s["spectrum"]["crossing_lo"] = real(sp.crossing_lo);
    s["spectrum"]["crossing_hi"] = real(sp.crossing_hi);
    s["spectrum"]["zoom_halfwidth"] = real(sp.zoom_halfwidth);
    s["spectrum"]["zoom_points"] = integer(sp.zoom_points);

    DynamicsSection& dy = c.dynamics;
    s["dynamics"]["gamma_a10"] = real(dy.rates.gamma_a10);
    s["dynamics"]["gamma_b10"] = real(dy.rates.gamma_b10);
    s["dynamics"]["gamma_a21"] = real(dy.rates.gamma_a21);
    s["dynamics"]["gamma_b21"] = real(dy.rates.gamma_b21);
    s["dynamics"]["kappa"] = real(dy.rates.kappa);
    s["dynamics"]["dt_ns"] = real(dy.dt_ns);
    s["dynamics"]["t_final_us"] = real(dy.t_final_us);
    s["dynamics"]["sample_every_ns"] = real(dy.sample_every_ns);

    TrajectorySection& tr = c.trajectories;
    s["trajectories"]["gamma_a10"] = real(tr.gamma_a10);
    s["trajectories"]["gamma_b10"] = real(tr.gamma_b10);
    s["trajectories"]["efficiencies"] = list(tr.efficiencies);
    s["trajectories"]["dt_ns"] = real(tr.dt_ns);
    s["trajectories"]["t_final_us"] = real(tr.t_final_us);
    s["trajectories"]["sample_every_ns"] = real(tr.sample_every_ns);
    s["trajectories"]["me_dt_ns"] = real(tr.me_dt_ns);
    s["trajectories"]["n_traj"] = [&tr](const std::string& v, const std::string& key) { tr.n_traj = to_integer(v, key); };
    s["trajectories"]["initial_state"] = [&tr](const std::string& v, const std::string&) { tr.initial_state = trim(v); };

    LiouvillianSection& li = c.liouvillian;
    s["liouvillian"]["gamma_a10"] = real(li.gamma_a10);
    s["liouvillian"]["gamma_b10"] = real(li.gamma_b10);
    s["liouvillian"]["lab_sweep"] = grid(li.lab_sweep);
    s["liouvillian"]["interaction_sweep"] = grid(li.interaction_sweep);
    s["liouvillian"]["efficiencies"] = list(li.efficiencies);
    s["liouvillian"]["lab_couplings"] = list(li.lab_couplings);
    s["liouvillian"]["lab_t_final_us"] = real(li.lab_t_final_us);
    s["liouvillian"]["lab_sample_us"] = real(li.lab_sample_us);
    s["liouvillian"]["pt_couplings"] = list(li.pt_couplings);
    s["liouvillian"]["pt_periods"] = real(li.pt_periods);
    s["liouvillian"]["pt_samples_per_period"] = real(li.pt_samples_per_period);
    s["liouvillian"]["invariance_coupling"] = real(li.invariance_coupling);

    s["run"]["seed"] = [&c](const std::string& v, const std::string& key) {
        const long long seed = to_integer(v, key);
        if (seed < 0) config_error(key, "seed must be nonnegative");
        c.seed = static_cast<std::uint64_t>(seed);
    };
    s["run"]["threads"] = integer(c.threads);
    s["run"]["output_dir"] = [&c](const std::string& v, const std::string&) { c.output_dir = trim(v); };
    return s;
}

void check(bool ok, const std::string& key, const std::string& what)
{
    if (!ok) config_error(key, what);
}

}  // namespace

std::vector<double> GridSpec::values() const
{
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    return v;
}

GridSpec GridSpec::parse(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    GridSpec g;
    if (parts.size() == 1) {
        g.start = g.stop = to_double(parts[0], "grid");
        g.count = 1;
    } else if (parts.size() == 3) {
        g.start = to_double(parts[0], "grid");
        g.stop = to_double(parts[1], "grid");
        g.count = static_cast<int>(to_integer(parts[2], "grid"));
    } else {
        fail(ErrorKind::Config, "grid: expected 'value' or 'start:stop:count', got '" + text + "'");
    }
    if (g.count < 1) fail(ErrorKind::Config, "grid: count must be >= 1");
    return g;
}

void RunConfig::validate() const
{
    auto wrap = [](const std::string& key, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            config_error(key, e.what());
        }
    };
    wrap("transmon_a", [&] { transmon_a.validate(); });
    wrap("transmon_b", [&] { transmon_b.validate(); });
    wrap("cavity", [&] { cavity.validate(); });
    wrap("dynamics", [&] { dynamics.rates.validate(); });
    check(zeta_a >= 0.0 && zeta_b >= 0.0, "coupling", "zeta must be nonnegative");
    check(!g_eg_override_mhz || std::isfinite(*g_eg_override_mhz), "coupling.g_eg_mhz", "must be finite");

    for (double f : spectrum.single_flux.values())
        check(f >= 0.0 && f <= 1.0, "spectrum.single_flux", "values must lie in [0, 1]");
    for (double f : spectrum.tct_flux.values())
        check(f >= 0.0 && f < 0.5, "spectrum.tct_flux", "values must lie in [0, 0.5)");
    check(spectrum.crossing_lo < spectrum.crossing_hi && spectrum.crossing_lo >= 0.0 && spectrum.crossing_hi < 0.5,
          "spectrum.crossing_lo/hi", "need 0 <= lo < hi < 0.5");
    check(spectrum.zoom_halfwidth > 0.0 && spectrum.zoom_points >= 2, "spectrum.zoom", "invalid zoom window");

    auto check_grid = [](const std::string& key, double dt, double sample, double t_final_us) {
        check(dt > 0.0 && sample >= dt && t_final_us > 0.0, key, "need 0 < dt <= sample interval and t_final > 0");
        const double ratio = sample / dt;
        check(std::abs(ratio - std::round(ratio)) < 1e-9 * ratio, key, "sample interval must be a multiple of dt");
    };
    check_grid("dynamics", dynamics.dt_ns, dynamics.sample_every_ns, dynamics.t_final_us);
    check_grid("trajectories", trajectories.dt_ns, trajectories.sample_every_ns, trajectories.t_final_us);
    check_grid("trajectories.me_dt_ns", trajectories.me_dt_ns, trajectories.sample_every_ns, trajectories.t_final_us);
    check(trajectories.gamma_a10 >= 0.0 && trajectories.gamma_b10 >= 0.0, "trajectories", "rates must be nonnegative");
    check(mhz_to_ghz(std::max(trajectories.gamma_a10, trajectories.gamma_b10)) * trajectories.dt_ns < 0.01,
          "trajectories.dt_ns", "Gamma dt must stay below 0.01");
    for (double eta : trajectories.efficiencies)
        check(eta >= 0.0 && eta <= 1.0, "trajectories.efficiencies", "values must lie in [0, 1]");
    check(trajectories.n_traj >= 1, "trajectories.n_traj", "must be >= 1");
    const std::string& s0 = trajectories.initial_state;
    check(s0 == "gg" || s0 == "ge" || s0 == "eg" || s0 == "ee", "trajectories.initial_state",
          "must be one of gg, ge, eg, ee");

    check(liouvillian.gamma_a10 >= 0.0 && liouvillian.gamma_b10 >= 0.0, "liouvillian", "rates must be nonnegative");
    for (double eta : liouvillian.efficiencies)
        check(eta >= 0.0 && eta <= 1.0, "liouvillian.efficiencies", "values must lie in [0, 1]");
    check(liouvillian.lab_t_final_us > 0.0 && liouvillian.lab_sample_us > 0.0, "liouvillian.lab_*", "must be positive");
    check(liouvillian.pt_periods > 0.0 && liouvillian.pt_samples_per_period >= 4.0, "liouvillian.pt_*",
          "need positive periods and >= 4 samples per period");
    check(threads >= 1, "run.threads", "must be >= 1");
}

RunConfig parse_config_text(const std::string& text)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorKind::Config, std::string("malformed config: ") + e.what());
    }
    RunConfig c;
    Schema s = schema(c);
    for (const auto& [section, body] : tree) {
        const auto sec = s.find(section);
        if (sec == s.end()) config_error(section, "unknown section");
        if (body.empty() && !body.data().empty()) config_error(section, "top-level keys are not allowed");
        for (const auto& [key, value] : body) {
            const auto setter = sec->second.find(key);
            if (setter == sec->second.end()) config_error(section + "." + key, "unknown key");
            setter->second(value.data(), section + "." + key);
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string default_config_text()
{
    const RunConfig c;
    std::ostringstream o;
    auto transmon = [&o](const char* name, const TransmonSpec& t, const std::string& flux) {
        o << '[' << name << "]\nec = " << format_number(t.ec) << "\nej_sigma = " << format_number(t.ej_sigma)
          << "\nflux = " << flux << "\ncharge_cutoff = " << t.charge_cutoff << "\n\n";
    };
    transmon("transmon_a", c.transmon_a, format_number(c.transmon_a.flux));
    transmon("transmon_b", c.transmon_b, "auto");
    o << "[cavity]\nfrequency = " << format_number(c.cavity.frequency) << "\nfock_cutoff = " << c.cavity.fock_cutoff
      << "\n\n[coupling]\nzeta_a = " << format_number(c.zeta_a) << "\nzeta_b = " << format_number(c.zeta_b)
      << "\ng_eg_mhz = auto\n\n";
    const SpectrumSection& sp = c.spectrum;
    o << "[spectrum]\nsingle_flux = " << render_grid(sp.single_flux) << "\ntct_flux = " << render_grid(sp.tct_flux)
      << "\ncrossing_lo = " << format_number(sp.crossing_lo) << "\ncrossing_hi = " << format_number(sp.crossing_hi)
      << "\nzoom_halfwidth = " << format_number(sp.zoom_halfwidth) << "\nzoom_points = " << sp.zoom_points << "\n\n";
    const DynamicsSection& dy = c.dynamics;
    o << "[dynamics]\ngamma_a10 = " << format_number(dy.rates.gamma_a10) << "\ngamma_b10 = "
      << format_number(dy.rates.gamma_b10) << "\ngamma_a21 = " << format_number(dy.rates.gamma_a21)
      << "\ngamma_b21 = " << format_number(dy.rates.gamma_b21) << "\nkappa = " << format_number(dy.rates.kappa)
      << "\ndt_ns = " << format_number(dy.dt_ns) << "\nt_final_us = " << format_number(dy.t_final_us)
      << "\nsample_every_ns = " << format_number(dy.sample_every_ns) << "\n\n";
    const TrajectorySection& tr = c.trajectories;
    o << "[trajectories]\ngamma_a10 = " << format_number(tr.gamma_a10) << "\ngamma_b10 = "
      << format_number(tr.gamma_b10) << "\nefficiencies = " << render_list(tr.efficiencies)
      << "\ndt_ns = " << format_number(tr.dt_ns) << "\nt_final_us = " << format_number(tr.t_final_us)
      << "\nsample_every_ns = " << format_number(tr.sample_every_ns) << "\nme_dt_ns = " << format_number(tr.me_dt_ns)
      << "\nn_traj = " << tr.n_traj << "\ninitial_state = " << tr.initial_state << "\n\n";
    const LiouvillianSection& li = c.liouvillian;
    o << "[liouvillian]\ngamma_a10 = " << format_number(li.gamma_a10) << "\ngamma_b10 = "
      << format_number(li.gamma_b10) << "\nlab_sweep = " << render_grid(li.lab_sweep)
      << "\ninteraction_sweep = " << render_grid(li.interaction_sweep)
      << "\nefficiencies = " << render_list(li.efficiencies) << "\nlab_couplings = " << render_list(li.lab_couplings)
      << "\nlab_t_final_us = " << format_number(li.lab_t_final_us) << "\nlab_sample_us = "
      << format_number(li.lab_sample_us) << "\npt_couplings = " << render_list(li.pt_couplings)
      << "\npt_periods = " << format_number(li.pt_periods) << "\npt_samples_per_period = "
      << format_number(li.pt_samples_per_period) << "\ninvariance_coupling = " << format_number(li.invariance_coupling)
      << "\n\n";
    o << "[run]\nseed = " << c.seed << "\nthreads = " << c.threads << "\n";
    return o.str();
}

}  // namespace cqed::cli
