#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tabf/abf_estimator.hpp"
#include "tabf/bias_function.hpp"
#include "tabf/geometry.hpp"
#include "tabf/potentials.hpp"
#include "tabf/reaction_coordinates.hpp"

namespace tabf {

enum class BiasMode { none, standard_abf, tensor_abf };
enum class EstimatorMode { time_average, ensemble_average };

struct SimulationConfig {
    double beta = 1.0;
    double dt = 1e-4;
    long long steps = 0;
    int replicas = 1;
    std::uint64_t seed = 0;
    BiasMode bias_mode = BiasMode::none;
    long long ramp_threshold = 100;
    EstimatorMode estimator_mode = EstimatorMode::time_average;
    double displacement_cap = 0.25;
    int threads = 1;
    bool noise_off = false;    // deterministic drift tests only
    bool coupled_form = false; // cross-bias-corrected local mean force when m == 2

    void validate() const;
};

// Replica positions on T^n plus the step counter. Noise is addressed by
// (seed, replica, step), so trajectories do not depend on thread layout.
class EnsembleState {
  public:
    EnsembleState(int replicas, int dimension);

    static EnsembleState uniform_random(int replicas, int dimension, std::uint64_t seed);
    static EnsembleState at_point(int replicas, const TorusPoint& x);

    int replicas() const { return replicas_; }
    int dimension() const { return dimension_; }
    std::uint64_t step_index() const { return step_index_; }
    void advance_step() { ++step_index_; }

    std::span<double> replica(int k) { return {positions_.data() + k * dimension_, static_cast<size_t>(dimension_)}; }
    std::span<const double> replica(int k) const { return {positions_.data() + k * dimension_, static_cast<size_t>(dimension_)}; }

  private:
    int replicas_;
    int dimension_;
    std::uint64_t step_index_ = 0;
    std::vector<double> positions_;
};

// One Euler-Maruyama step of the unbiased overdamped Langevin dynamics for
// every replica: x <- wrap(x - grad V dt + sqrt(2 dt / beta) g).
void step_unbiased(EnsembleState& state, const PotentialSpec& spec, const SimulationConfig& cfg);

// One tensor-ABF step. The bias grids are read as a frozen snapshot for the
// whole step; each replica then deposits one local-mean-force sample per
// group at its new position, and the deposits are merged in replica order
// after all replicas have moved. In ensemble_average mode the grids hold
// only the current step's samples. When `f_observer` is given (m == 2), the
// two-component mean-force vector is also binned on (xi1, xi2).
void step_tensor_abf(EnsembleState& state, const PotentialSpec& spec, const CoordinateSet& coords,
                     BiasGroupSet& bias, const SimulationConfig& cfg,
                     BiasGrid2D* f_observer = nullptr);

// One standard-ABF step over a single 2D grid: drift from the ramped
// per-bin mean of F, deposit of F at the new position.
void step_standard_abf(EnsembleState& state, const PotentialSpec& spec,
                       const CoordinateSet& coords, BiasGrid2D& bias,
                       const SimulationConfig& cfg);

// Sampling under a fixed separable bias (one derivative function per
// coordinate); no deposits. Optionally tallies the (xi1, xi2) histogram of
// the visited states (m == 2).
void step_frozen_bias(EnsembleState& state, const PotentialSpec& spec, const CoordinateSet& coords,
                      const std::vector<BiasFunction1D>& bias_prime, const SimulationConfig& cfg,
                      JointHistogram2D* joint_observer = nullptr);

}  // namespace tabf
