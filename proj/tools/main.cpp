#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tabf/config.hpp"
#include "tabf/errors.hpp"
#include "tabf/experiments.hpp"

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  command-line usage error\n"
    "  2  config schema violation\n"
    "  3  solver non-convergence\n"
    "  4  integrator blow-up / numerical instability\n"
    "  5  I/O failure\n"
    "  6  internal error\n";

void print_error_record(const std::string& kind, const std::string& message) {
    nlohmann::json err;
    err["error"] = kind;
    err["message"] = message;
    std::fprintf(stderr, "%s\n", err.dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tensorized adaptive-biasing-force toolkit for periodic model potentials"};
    app.footer(kExitCodes);
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::string seed_override;
    int threads_override = 0;
    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("config", config_path, "Path to the experiment config")->required();
    run->add_option("--output-dir", output_dir, "Override the config's output directory");
    run->add_option("--seed", seed_override, "Override the RNG seed");
    run->add_option("--threads", threads_override, "Override the worker thread count");

    std::string dir_a, dir_b;
    auto* diff = app.add_subcommand("diff", "Compare the CSV artifacts of two runs");
    diff->add_option("dir_a", dir_a, "First artifact directory")->required();
    diff->add_option("dir_b", dir_b, "Second artifact directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            auto cfg = tabf::ExperimentConfig::from_file(config_path);
            if (!output_dir.empty()) cfg.output_dir = output_dir;
            if (!seed_override.empty()) cfg.simulation.seed = std::stoull(seed_override);
            if (threads_override > 0) cfg.simulation.threads = threads_override;
            tabf::run_experiment(cfg);
            std::printf("artifacts written to %s\n", cfg.output_dir.c_str());
            return 0;
        }
        if (diff->parsed()) {
            const auto report = tabf::diff_artifacts(dir_a, dir_b);
            for (const auto& entry : report.entries) {
                std::printf("%-32s rms %.6e max %.6e (%zu values)\n", entry.file.c_str(),
                            entry.rms, entry.max, entry.values);
            }
            for (const auto& name : report.only_in_a) {
                std::printf("%-32s only in %s\n", name.c_str(), dir_a.c_str());
            }
            for (const auto& name : report.only_in_b) {
                std::printf("%-32s only in %s\n", name.c_str(), dir_b.c_str());
            }
            return 0;
        }
    } catch (const tabf::ConfigError& e) {
        print_error_record("config", e.what());
        return 2;
    } catch (const tabf::ConvergenceError& e) {
        print_error_record("non-convergence", e.what());
        return 3;
    } catch (const tabf::IntegratorError& e) {
        print_error_record("integrator", e.what());
        return 4;
    } catch (const std::ios_base::failure& e) {
        print_error_record("io", e.what());
        return 5;
    } catch (const std::exception& e) {
        print_error_record("internal", e.what());
        return 6;
    }
    return 1;
}
