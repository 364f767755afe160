// Figure-reproduction driver: cqed-sim <spectrum|dynamics|trajectories|liouvillian|all> [flags]
#include "cqed/cli/config.hpp"
#include "cqed/cli/pipelines.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 1;

}  // namespace

int main(int argc, char** argv)
{
    using namespace cqed;
    CLI::App app{"Two-transmon circuit QED simulator: spectra, dynamics, trajectories, Liouvillian analysis"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string flux_grid;
    bool no_svg = false;
    bool print_config = false;
    app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default: [run] output_dir, then $CQED_OUT_DIR, then ./out)");
    app.add_option("--seed", seed, "random seed for trajectory ensembles");
    app.add_option("--threads", threads, "worker threads for trajectory ensembles")->check(CLI::PositiveNumber);
    app.add_option("--flux-grid", flux_grid, "flux grid for the spectrum sweeps, start:stop:count or a value");
    app.add_flag("--no-svg", no_svg, "write CSV files only");
    app.add_flag("--print-default-config", print_config, "print the built-in configuration and exit");
    for (const char* name : {"spectrum", "dynamics", "trajectories", "liouvillian", "all"})
        app.add_subcommand(name, std::string("run the ") + name + " pipeline");

    // The default-config flag works without a subcommand.
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--print-default-config") {
            std::cout << cli::default_config_text();
            return EXIT_SUCCESS;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        cli::RunConfig config = config_path.empty() ? cli::parse_config_text("") : cli::load_config(config_path);
        if (seed) config.seed = *seed;
        if (threads) config.threads = *threads;
        cli::PipelineOptions options;
        options.svg = !no_svg;
        if (!flux_grid.empty()) options.flux_grid = cli::GridSpec::parse(flux_grid);
        if (!out_dir.empty()) {
            options.output_dir = out_dir;
        } else if (!config.output_dir.empty()) {
            options.output_dir = config.output_dir;
        } else if (const char* env = std::getenv("CQED_OUT_DIR"); env && *env) {
            options.output_dir = env;
        } else {
            options.output_dir = "out";
        }
        config.validate();

        for (const std::string& file : cli::run_command(command, config, options))
            std::cout << options.output_dir << "/" << file << "\n";
    } catch (const Error& e) {
        std::cerr << "cqed-sim: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return e.kind() == ErrorKind::Config ? kExitConfig : kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "cqed-sim: " << e.what() << "\n";
        return kExitIo;
    }
    return EXIT_SUCCESS;
}
