#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tabf/config.hpp"
#include "tabf/free_energy.hpp"
#include "tabf/oracle.hpp"

namespace tabf {

// Executes the configured experiment and writes its artifact directory
// (CSV/PGM/JSON plus manifest.json). Throws ConfigError, ConvergenceError,
// IntegratorError or std::runtime_error on failure.
void run_experiment(const ExperimentConfig& cfg);

struct DiffEntry {
    std::string file;
    double rms = 0.0;
    double max = 0.0;
    size_t values = 0;
};

struct DiffReport {
    std::vector<DiffEntry> entries;
    std::vector<std::string> only_in_a;
    std::vector<std::string> only_in_b;
};

// Per-file RMS/max differences between the CSV artifacts of two runs.
// Throws on shape mismatches.
DiffReport diff_artifacts(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b);

// Shared builders, also used by the acceptance suite.
DensityField2D make_initial_density(const FokkerPlanckConfig& fp, const PotentialSpec& spec,
                                    double beta);
GradientField2D load_gradient_field(const std::filesystem::path& csv_path);

}  // namespace tabf
