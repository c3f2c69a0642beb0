#include "tabf/sampler.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "tabf/errors.hpp"
#include "tabf/rng.hpp"

namespace tabf {

namespace {

// Step index reserved for initial-position draws.
constexpr std::uint64_t kInitStep = ~std::uint64_t{0};

// Runs body(lo, hi) over a partition of [0, replicas), possibly on
// several threads. Workers touch disjoint replica ranges only.
void run_replica_ranges(int replicas, int threads, const std::function<void(int, int)>& body) {
    if (threads <= 1 || replicas < 2 * threads) {
        body(0, replicas);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    const int chunk = (replicas + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(replicas, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// In-place Euler-Maruyama update of one replica.
void em_update(std::span<double> x, std::span<const double> drift, const SimulationConfig& cfg,
               int replica, std::uint64_t step) {
    const int n = static_cast<int>(x.size());
    const double amp = cfg.noise_off ? 0.0 : std::sqrt(2.0 * cfg.dt / cfg.beta);
    double pair[2] = {0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        if (i % 2 == 0 && amp != 0.0) {
            const NormalPair p = counter_normals(cfg.seed, static_cast<std::uint32_t>(replica),
                                                 step, static_cast<std::uint32_t>(i / 2));
            pair[0] = p.z0;
            pair[1] = p.z1;
        }
        const double dx = drift[i] * cfg.dt + amp * pair[i % 2];
        if (std::abs(dx) > cfg.displacement_cap) {
            throw IntegratorError("displacement cap exceeded by replica " +
                                  std::to_string(replica) + " at step " + std::to_string(step) +
                                  " (|dx| = " + std::to_string(std::abs(dx)) +
                                  "); reduce dt or raise displacement_cap");
        }
        x[i] = wrap(x[i] + dx);
    }
}

}  // namespace

void SimulationConfig::validate() const {
    if (beta <= 0.0) throw std::invalid_argument("SimulationConfig: beta must be > 0");
    if (dt <= 0.0) throw std::invalid_argument("SimulationConfig: dt must be > 0");
    if (replicas < 1) throw std::invalid_argument("SimulationConfig: replicas must be >= 1");
    if (steps < 0) throw std::invalid_argument("SimulationConfig: steps must be >= 0");
    if (ramp_threshold < 0) {
        throw std::invalid_argument("SimulationConfig: ramp_threshold must be >= 0");
    }
    if (displacement_cap <= 0.0 || displacement_cap > 0.5) {
        throw std::invalid_argument("SimulationConfig: displacement_cap must lie in (0, 0.5]");
    }
    if (threads < 1) throw std::invalid_argument("SimulationConfig: threads must be >= 1");
}

EnsembleState::EnsembleState(int replicas, int dimension)
    : replicas_(replicas), dimension_(dimension),
      positions_(static_cast<size_t>(replicas) * dimension, 0.0) {
    if (replicas < 1 || dimension < 1) {
        throw std::invalid_argument("EnsembleState: replicas and dimension must be >= 1");
    }
}

EnsembleState EnsembleState::uniform_random(int replicas, int dimension, std::uint64_t seed) {
    EnsembleState state(replicas, dimension);
    for (int r = 0; r < replicas; ++r) {
        auto x = state.replica(r);
        for (int i = 0; i < dimension; ++i) {
            x[i] = counter_uniform(seed, static_cast<std::uint32_t>(r), kInitStep,
                                   static_cast<std::uint32_t>(i));
        }
    }
    return state;
}

EnsembleState EnsembleState::at_point(int replicas, const TorusPoint& x) {
    EnsembleState state(replicas, x.dimension());
    for (int r = 0; r < replicas; ++r) {
        auto p = state.replica(r);
        for (int i = 0; i < x.dimension(); ++i) p[i] = x[i];
    }
    return state;
}

void step_unbiased(EnsembleState& state, const PotentialSpec& spec, const SimulationConfig& cfg) {
    const int n = state.dimension();
    if (n != spec.dimension()) {
        throw std::invalid_argument("step_unbiased: state/potential dimension mismatch");
    }
    const std::uint64_t step = state.step_index();
    run_replica_ranges(state.replicas(), cfg.threads, [&](int lo, int hi) {
        std::vector<double> drift(n);
        for (int r = lo; r < hi; ++r) {
            auto x = state.replica(r);
            spec.gradient(x, drift);
            for (double& d : drift) d = -d;
            em_update(x, drift, cfg, r, step);
        }
    });
    state.advance_step();
}

void step_tensor_abf(EnsembleState& state, const PotentialSpec& spec, const CoordinateSet& coords,
                     BiasGroupSet& bias, const SimulationConfig& cfg, BiasGrid2D* f_observer) {
    const int n = state.dimension();
    if (n != spec.dimension() || n != coords.ambient_dimension()) {
        throw std::invalid_argument("step_tensor_abf: dimension mismatch");
    }
    const auto& groups = coords.groups();
    if (static_cast<int>(groups.size()) != bias.group_count()) {
        throw std::invalid_argument("step_tensor_abf: bias groups do not match coordinate groups");
    }
    for (int g = 0; g < bias.group_count(); ++g) {
        if (static_cast<int>(groups[g].size()) != bias.arity(g)) {
            throw std::invalid_argument("step_tensor_abf: group arity mismatch");
        }
    }
    if (f_observer && coords.size() != 2) {
        throw std::invalid_argument("step_tensor_abf: the F observer needs exactly 2 coordinates");
    }
    const bool coupled = cfg.coupled_form && coords.size() == 2 && groups.size() == 2 &&
                         groups[0].size() == 1 && groups[1].size() == 1;

    const std::uint64_t step = state.step_index();
    const int replicas = state.replicas();
    const int n_groups = bias.group_count();

    // Deposit buffers, filled per replica during the parallel phase and
    // applied in replica order afterwards so results are independent of
    // the thread count.
    std::vector<double> dep_z(static_cast<size_t>(replicas) * n_groups);
    std::vector<double> dep_v(static_cast<size_t>(replicas) * n_groups);
    std::vector<double> dep_z2(static_cast<size_t>(replicas) * n_groups);  // pair groups only
    std::vector<double> dep_v2(static_cast<size_t>(replicas) * n_groups);
    std::vector<double> obs(f_observer ? static_cast<size_t>(replicas) * 4 : 0);

    run_replica_ranges(replicas, cfg.threads, [&](int lo, int hi) {
        std::vector<double> drift(n), grad_v(n);
        for (int r = lo; r < hi; ++r) {
            auto x = state.replica(r);
            spec.gradient(x, drift);
            for (double& d : drift) d = -d;
            for (int g = 0; g < n_groups; ++g) {
                if (bias.arity(g) == 1) {
                    const auto& rc = coords.coord(groups[g][0]);
                    const double d =
                        bias.grid1d(g).bias_derivative(rc.value(x), cfg.ramp_threshold);
                    const auto grad = rc.gradient();
                    for (int i = 0; i < n; ++i) drift[i] += d * grad[i];
                } else {
                    const auto& rc1 = coords.coord(groups[g][0]);
                    const auto& rc2 = coords.coord(groups[g][1]);
                    double f1 = 0.0, f2 = 0.0;
                    bias.grid2d(g).bias_force(rc1.value(x), rc2.value(x), cfg.ramp_threshold, f1,
                                              f2);
                    const auto grad1 = rc1.gradient();
                    const auto grad2 = rc2.gradient();
                    for (int i = 0; i < n; ++i) drift[i] += f1 * grad1[i] + f2 * grad2[i];
                }
            }
            em_update(x, drift, cfg, r, step);

            // Local-mean-force samples at the new position, still against
            // the start-of-step bias snapshot.
            spec.gradient(x, grad_v);
            for (int g = 0; g < n_groups; ++g) {
                const size_t slot = static_cast<size_t>(g) * replicas + r;
                if (bias.arity(g) == 1) {
                    const int c = groups[g][0];
                    const auto& rc = coords.coord(c);
                    const auto grad = rc.gradient();
                    double dot = 0.0;
                    for (int i = 0; i < n; ++i) dot += grad_v[i] * grad[i];
                    double f = dot / rc.grad_norm_sq();
                    if (coupled) {
                        const auto& rc_other = coords.coord(1 - c);
                        const double other_prime = bias.grid1d(1 - g).bias_derivative(
                            rc_other.value(x), cfg.ramp_threshold);
                        const auto grad_other = rc_other.gradient();
                        double cross = 0.0;
                        for (int i = 0; i < n; ++i) cross += grad_other[i] * grad[i];
                        f -= other_prime * cross / rc.grad_norm_sq();
                    }
                    dep_z[slot] = rc.value(x);
                    dep_v[slot] = f;
                } else {
                    const auto f = mean_force_vector(coords, spec, x);
                    dep_z[slot] = coords.coord(groups[g][0]).value(x);
                    dep_z2[slot] = coords.coord(groups[g][1]).value(x);
                    dep_v[slot] = f[0];
                    dep_v2[slot] = f[1];
                }
            }
            if (f_observer) {
                const auto f = mean_force_vector(coords, spec, x);
                obs[4 * static_cast<size_t>(r) + 0] = coords.coord(0).value(x);
                obs[4 * static_cast<size_t>(r) + 1] = coords.coord(1).value(x);
                obs[4 * static_cast<size_t>(r) + 2] = f[0];
                obs[4 * static_cast<size_t>(r) + 3] = f[1];
            }
        }
    });

    if (cfg.estimator_mode == EstimatorMode::ensemble_average) bias.clear_all();
    for (int r = 0; r < replicas; ++r) {
        for (int g = 0; g < n_groups; ++g) {
            const size_t slot = static_cast<size_t>(g) * replicas + r;
            if (bias.arity(g) == 1) {
                bias.grid1d(g).deposit(dep_z[slot], dep_v[slot]);
            } else {
                bias.grid2d(g).deposit(dep_z[slot], dep_z2[slot], dep_v[slot], dep_v2[slot]);
            }
        }
        if (f_observer) {
            f_observer->deposit(obs[4 * static_cast<size_t>(r) + 0],
                                obs[4 * static_cast<size_t>(r) + 1],
                                obs[4 * static_cast<size_t>(r) + 2],
                                obs[4 * static_cast<size_t>(r) + 3]);
        }
    }
    state.advance_step();
}

void step_standard_abf(EnsembleState& state, const PotentialSpec& spec,
                       const CoordinateSet& coords, BiasGrid2D& bias,
                       const SimulationConfig& cfg) {
    const int n = state.dimension();
    if (n != spec.dimension() || n != coords.ambient_dimension()) {
        throw std::invalid_argument("step_standard_abf: dimension mismatch");
    }
    if (coords.size() != 2) {
        throw std::invalid_argument("step_standard_abf: needs exactly two coordinates");
    }
    gram_matrix(coords);  // rejects singular coordinate pairs up front

    const std::uint64_t step = state.step_index();
    const int replicas = state.replicas();
    std::vector<double> dep(static_cast<size_t>(replicas) * 4);

    run_replica_ranges(replicas, cfg.threads, [&](int lo, int hi) {
        std::vector<double> drift(n);
        for (int r = lo; r < hi; ++r) {
            auto x = state.replica(r);
            spec.gradient(x, drift);
            for (double& d : drift) d = -d;
            double g1 = 0.0, g2 = 0.0;
            bias.bias_force(coords.coord(0).value(x), coords.coord(1).value(x),
                            cfg.ramp_threshold, g1, g2);
            const auto grad1 = coords.coord(0).gradient();
            const auto grad2 = coords.coord(1).gradient();
            for (int i = 0; i < n; ++i) drift[i] += g1 * grad1[i] + g2 * grad2[i];
            em_update(x, drift, cfg, r, step);

            const auto f = mean_force_vector(coords, spec, x);
            dep[4 * static_cast<size_t>(r) + 0] = coords.coord(0).value(x);
            dep[4 * static_cast<size_t>(r) + 1] = coords.coord(1).value(x);
            dep[4 * static_cast<size_t>(r) + 2] = f[0];
            dep[4 * static_cast<size_t>(r) + 3] = f[1];
        }
    });

    if (cfg.estimator_mode == EstimatorMode::ensemble_average) bias.clear();
    for (int r = 0; r < replicas; ++r) {
        bias.deposit(dep[4 * static_cast<size_t>(r) + 0], dep[4 * static_cast<size_t>(r) + 1],
                     dep[4 * static_cast<size_t>(r) + 2], dep[4 * static_cast<size_t>(r) + 3]);
    }
    state.advance_step();
}

void step_frozen_bias(EnsembleState& state, const PotentialSpec& spec, const CoordinateSet& coords,
                      const std::vector<BiasFunction1D>& bias_prime, const SimulationConfig& cfg,
                      JointHistogram2D* joint_observer) {
    const int n = state.dimension();
    if (n != spec.dimension() || n != coords.ambient_dimension()) {
        throw std::invalid_argument("step_frozen_bias: dimension mismatch");
    }
    if (static_cast<int>(bias_prime.size()) != coords.size()) {
        throw std::invalid_argument("step_frozen_bias: one bias derivative per coordinate");
    }
    if (joint_observer && coords.size() != 2) {
        throw std::invalid_argument("step_frozen_bias: joint observer needs two coordinates");
    }

    const std::uint64_t step = state.step_index();
    const int replicas = state.replicas();
    std::vector<double> obs(joint_observer ? static_cast<size_t>(replicas) * 2 : 0);

    run_replica_ranges(replicas, cfg.threads, [&](int lo, int hi) {
        std::vector<double> drift(n);
        for (int r = lo; r < hi; ++r) {
            auto x = state.replica(r);
            spec.gradient(x, drift);
            for (double& d : drift) d = -d;
            for (int c = 0; c < coords.size(); ++c) {
                const auto& rc = coords.coord(c);
                const double d = bias_prime[c](rc.value(x));
                const auto grad = rc.gradient();
                for (int i = 0; i < n; ++i) drift[i] += d * grad[i];
            }
            em_update(x, drift, cfg, r, step);
            if (joint_observer) {
                obs[2 * static_cast<size_t>(r) + 0] = coords.coord(0).value(x);
                obs[2 * static_cast<size_t>(r) + 1] = coords.coord(1).value(x);
            }
        }
    });

    if (joint_observer) {
        for (int r = 0; r < replicas; ++r) {
            joint_observer->add(obs[2 * static_cast<size_t>(r) + 0],
                                obs[2 * static_cast<size_t>(r) + 1]);
        }
    }
    state.advance_step();
}

}  // namespace tabf
