#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabf/potentials.hpp"
#include "tabf/reaction_coordinates.hpp"
#include "tabf/sampler.hpp"

namespace tabf {

enum class ExperimentKind {
    unbiased,
    tensor_abf,
    standard_abf,
    seeded_abf,
    fokker_planck,
    stationary_solver,
    oracle_tables,
    diagnose,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct PotentialConfig {
    std::string family;           // named family, or "terms"
    double parameter = 0.0;
    int dimension = 2;            // explicit term lists only
    std::vector<CosineTerm> terms;

    PotentialSpec build() const;
};

struct CoordinateConfig {
    std::string kind;              // "projection" | "integer_combination"
    int axis = 1;                  // 1-based in config files
    std::vector<int> coefficients;
};

struct GridConfig {
    int bias_bins = 64;
    int surface_bins = 64;
    int oracle_bins = 128;
    int quadrature_points = 0;  // 0 = per-operation default
};

struct FokkerPlanckConfig {
    int bins = 128;
    double dt = 0.0;  // 0 = automatic from the stability bound
    double t_final = 0.1;
    bool adaptive = true;
    std::string initial = "uniform";  // uniform | one_plus_cosine | gibbs | stationary
    int initial_axis = 1;             // 1-based
    double initial_amplitude = 0.5;
    long long snapshot_every = 50;
    double fit_begin = 0.0;  // 0,0 = automatic window
    double fit_end = 0.0;
};

struct SolverConfig {
    int bins = 128;
    double tol = 1e-10;
    int max_iter = 20000;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::oracle_tables;
    PotentialConfig potential;
    std::vector<CoordinateConfig> coordinates;
    std::vector<std::vector<int>> groups;  // 1-based coordinate indices
    GridConfig grids;
    SimulationConfig simulation;
    FokkerPlanckConfig fokker_planck;
    SolverConfig solver;
    std::string output_dir = "out";
    std::string input_dir;  // seeded_abf: artifact directory of the source run

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::filesystem::path& path);

    // Canonical form with every effective value spelled out; hashed into
    // the manifest.
    nlohmann::json to_json() const;
    std::string hash() const;

    CoordinateSet build_coordinates() const;
};

}  // namespace tabf
