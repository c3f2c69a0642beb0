#include "tabf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "tabf/diagnostics.hpp"
#include "tabf/errors.hpp"
#include "tabf/io.hpp"
#include "tabf/sampler.hpp"

namespace tabf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// Collects artifact files and writes the closing manifest. The manifest
// carries no timestamps so reruns with identical configs are
// byte-identical.
class ArtifactWriter {
  public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    const fs::path& dir() const { return dir_; }

    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& columns) {
        write_csv(dir_ / name, header, columns);
        record(name);
    }

    void pgm(const std::string& name, int bins1, int bins2, std::span<const double> values,
             std::span<const std::uint8_t> mask) {
        write_pgm_with_sidecar(dir_ / name, bins1, bins2, values, mask);
        record(name);
        record(name + ".json");
    }

    void json_file(const std::string& name, const json& j) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + (dir_ / name).string());
        out << j.dump(2) << "\n";
        out.close();
        record(name);
    }

    void finalize(const ExperimentConfig& cfg, const json& extra = json::object()) {
        json manifest;
        manifest["tool"] = {{"name", "tabf"}, {"version", kToolVersion}};
        manifest["experiment"] = to_string(cfg.experiment);
        manifest["config"] = cfg.to_json();
        manifest["config_hash"] = cfg.hash();
        manifest["seed"] = cfg.simulation.seed;
        json files = json::array();
        for (const auto& [name, hash] : files_) {
            files.push_back({{"name", name}, {"fnv1a64", hash}});
        }
        manifest["files"] = files;
        for (const auto& item : extra.items()) manifest[item.key()] = item.value();
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
    }

  private:
    void record(const std::string& name) { files_.emplace_back(name, hash_file(dir_ / name)); }

    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::vector<std::vector<double>> surface_columns(const FreeEnergySurface2D& s) {
    std::vector<double> z1, z2, v, m;
    for (int i = 0; i < s.bins1(); ++i) {
        for (int j = 0; j < s.bins2(); ++j) {
            z1.push_back(s.grid1().center(i));
            z2.push_back(s.grid2().center(j));
            v.push_back(s.visited(i, j) ? s.value(i, j) : 0.0);
            m.push_back(s.visited(i, j) ? 1.0 : 0.0);
        }
    }
    return {z1, z2, v, m};
}

void write_surface(ArtifactWriter& out, const std::string& stem, const FreeEnergySurface2D& s) {
    out.csv(stem + ".csv", {"z1", "z2", "value", "mask"}, surface_columns(s));
    out.pgm(stem + ".pgm", s.bins1(), s.bins2(), s.values(), s.visited_flags());
}

void write_bias_grid(ArtifactWriter& out, const std::string& name, const BiasGrid1D& grid) {
    std::vector<double> center, count, mean;
    for (int k = 0; k < grid.bins(); ++k) {
        center.push_back(grid.grid().center(k));
        count.push_back(static_cast<double>(grid.count(k)));
        mean.push_back(grid.mean(k));
    }
    out.csv(name, {"bin_center", "count", "mean_force"}, {center, count, mean});
}

void write_bias_function(ArtifactWriter& out, const std::string& name, const BiasFunction1D& f) {
    std::vector<double> z, v;
    for (int k = 0; k < f.bins(); ++k) {
        z.push_back(f.grid.center(k));
        v.push_back(f.values[k]);
    }
    out.csv(name, {"z", "value"}, {z, v});
}

void write_field_grid(ArtifactWriter& out, const std::string& name, const BiasGrid2D& grid) {
    std::vector<double> z1, z2, count, m1, m2;
    for (int k1 = 0; k1 < grid.bins1(); ++k1) {
        for (int k2 = 0; k2 < grid.bins2(); ++k2) {
            z1.push_back(grid.grid1().center(k1));
            z2.push_back(grid.grid2().center(k2));
            count.push_back(static_cast<double>(grid.count(k1, k2)));
            m1.push_back(grid.mean1(k1, k2));
            m2.push_back(grid.mean2(k1, k2));
        }
    }
    out.csv(name, {"z1", "z2", "count", "mean_f1", "mean_f2"}, {z1, z2, count, m1, m2});
}

json grid_snapshot_json(const ExperimentConfig& cfg, const BiasGroupSet& bias,
                        const CoordinateSet& coords) {
    json snap;
    snap["config_hash"] = cfg.hash();
    json groups = json::array();
    for (int g = 0; g < bias.group_count(); ++g) {
        json jg;
        jg["arity"] = bias.arity(g);
        if (bias.arity(g) == 1) {
            const auto& grid = bias.grid1d(g);
            jg["coordinate"] = coords.coord(coords.groups()[g][0]).describe();
            jg["bins"] = grid.bins();
            jg["counts"] = grid.counts();
            jg["force_sums"] = grid.force_sums();
            jg["periodicity_residual"] = grid.periodicity_residual();
        } else {
            const auto& grid = bias.grid2d(g);
            jg["bins1"] = grid.bins1();
            jg["bins2"] = grid.bins2();
            jg["counts"] = grid.counts();
            jg["force_sums1"] = grid.force_sums1();
            jg["force_sums2"] = grid.force_sums2();
        }
        groups.push_back(jg);
    }
    snap["groups"] = groups;
    return snap;
}

// Entropy and bias-error series accumulated over Fokker-Planck snapshots.
struct FpSeries {
    std::vector<double> t, entropy, fisher, h_m1, h_m2, a1_err, a2_err, ck_l1, ck_bound, ck_ok;

    void add(const FpSnapshot& snap, const DensityField2D& reference,
             const std::vector<double>& p1_ref, const std::vector<double>& p2_ref) {
        t.push_back(snap.time);
        entropy.push_back(relative_entropy(snap.psi.values(), reference.values()));
        fisher.push_back(fisher_information_2d(snap.psi, reference));
        const auto m1 = snap.psi.marginal(0);
        const auto m2 = snap.psi.marginal(1);
        const std::vector<double> unif1(m1.size(), 1.0), unif2(m2.size(), 1.0);
        h_m1.push_back(relative_entropy(m1, unif1));
        h_m2.push_back(relative_entropy(m2, unif2));
        double e1 = 0.0, e2 = 0.0;
        if (!p1_ref.empty()) {
            for (size_t i = 0; i < p1_ref.size(); ++i) {
                const double d = snap.bias_prime1[i] - p1_ref[i];
                e1 += d * d;
            }
            e1 /= static_cast<double>(p1_ref.size());
            for (size_t j = 0; j < p2_ref.size(); ++j) {
                const double d = snap.bias_prime2[j] - p2_ref[j];
                e2 += d * d;
            }
            e2 /= static_cast<double>(p2_ref.size());
        }
        a1_err.push_back(e1);
        a2_err.push_back(e2);
        const auto ck = csiszar_kullback_check(snap.psi.values(), reference.values());
        ck_l1.push_back(ck.l1);
        ck_bound.push_back(ck.bound);
        ck_ok.push_back(ck.ok ? 1.0 : 0.0);
    }
};

// Fit window for a decaying series: skip the first decade, stop a safe
// margin above the series floor.
std::pair<double, double> auto_fit_window(const std::vector<double>& t,
                                          const std::vector<double>& s) {
    const double s0 = std::max(s.front(), 1e-300);
    double smin = s0;
    for (double v : s) {
        if (v > 0.0) smin = std::min(smin, v);
    }
    const double hi_threshold = s0 * 0.1;
    const double lo_threshold = std::max({smin * 20.0, s0 * 1e-9, 1e-13});
    double t_lo = t.front(), t_hi = t.back();
    for (size_t k = 0; k < t.size(); ++k) {
        if (s[k] < hi_threshold) {
            t_lo = t[k];
            break;
        }
    }
    for (size_t k = 0; k < t.size(); ++k) {
        if (s[k] < lo_threshold) {
            t_hi = t[k];
            break;
        }
    }
    int points = 0;
    for (size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= t_lo && t[k] <= t_hi) ++points;
    }
    if (points < 10 || t_hi <= t_lo) return {t.front(), t.back()};
    return {t_lo, t_hi};
}

json fit_to_json(const DecayFit& fit) {
    return {{"rate", fit.rate},
            {"r_squared", fit.r_squared},
            {"points", fit.points},
            {"window_begin", fit.window_begin},
            {"window_end", fit.window_end}};
}

json report_to_json(const ConvergenceReport& report) {
    json j;
    j["kappa1"] = report.kappa1;
    j["kappa2"] = report.kappa2;
    j["rho1_lb"] = report.rho1_lb;
    j["rho2_lb"] = report.rho2_lb;
    j["lambda_lb"] = report.lambda_lb;
    j["r"] = report.r;
    j["condition18"] = report.condition18;
    json rates = json::object();
    for (const auto& [name, fit] : report.fitted_rates) rates[name] = fit_to_json(fit);
    j["fitted_rates"] = rates;
    return j;
}

void run_oracle_tables(const ExperimentConfig& cfg, ArtifactWriter& out) {
    const PotentialSpec spec = cfg.potential.build();
    const double beta = cfg.simulation.beta;
    const int bins = cfg.grids.oracle_bins;
    const int q = cfg.grids.quadrature_points;
    const auto surface = free_energy_2d(spec, beta, bins, q);
    write_surface(out, "surface_A", surface);
    const auto a1 = free_energy_1d(spec, 0, beta, bins, q);
    const auto a2 = free_energy_1d(spec, 1, beta, bins, q);
    write_bias_function(out, "a1.csv", a1);
    write_bias_function(out, "a2.csv", a2);
    write_bias_function(out, "mean_force_1.csv", mean_force_1d(spec, 0, beta, bins, q));
    write_bias_function(out, "mean_force_2.csv", mean_force_1d(spec, 1, beta, bins, q));

    // sup deviation of A - A1 - A2 from its mean; zero iff decoupled.
    double mean_diff = 0.0;
    for (int i = 0; i < bins; ++i) {
        for (int j = 0; j < bins; ++j) {
            mean_diff += surface.value(i, j) - a1.values[i] - a2.values[j];
        }
    }
    mean_diff /= static_cast<double>(bins) * bins;
    double sup_dev = 0.0;
    for (int i = 0; i < bins; ++i) {
        for (int j = 0; j < bins; ++j) {
            sup_dev = std::max(sup_dev, std::abs(surface.value(i, j) - a1.values[i] -
                                                 a2.values[j] - mean_diff));
        }
    }
    json report;
    report["potential"] = spec.label();
    report["beta"] = beta;
    report["bins"] = bins;
    report["decomposition_residual_sup"] = sup_dev;
    out.json_file("report.json", report);
}

void run_stationary_solver(const ExperimentConfig& cfg, ArtifactWriter& out) {
    const PotentialSpec spec = cfg.potential.build();
    const double beta = cfg.simulation.beta;
    const auto surface = free_energy_2d(spec, beta, cfg.solver.bins, cfg.grids.quadrature_points);
    const auto pair = solve_stationary_pair(surface, beta, cfg.solver.tol, cfg.solver.max_iter);
    PeriodicGrid1D grid(cfg.solver.bins);
    write_bias_function(out, "rho1.csv", BiasFunction1D(grid, pair.rho1));
    write_bias_function(out, "rho2.csv", BiasFunction1D(grid, pair.rho2));
    write_bias_function(out, "a_inf_1.csv", BiasFunction1D(grid, pair.a_inf1));
    write_bias_function(out, "a_inf_2.csv", BiasFunction1D(grid, pair.a_inf2));
    const auto psi = pair.stationary_density(surface);
    std::vector<double> z1, z2, v;
    for (int i = 0; i < psi.bins1(); ++i) {
        for (int j = 0; j < psi.bins2(); ++j) {
            z1.push_back(grid.center(i));
            z2.push_back(grid.center(j));
            v.push_back(psi.at(i, j));
        }
    }
    out.csv("psi_inf.csv", {"z1", "z2", "value"}, {z1, z2, v});
    out.pgm("psi_inf.pgm", psi.bins1(), psi.bins2(), psi.values(), {});

    double tv = 0.0;
    for (double val : psi.values()) tv += std::abs(val - 1.0);
    tv = 0.5 * tv / static_cast<double>(psi.values().size());
    const auto m1 = psi.marginal(0);
    const auto m2 = psi.marginal(1);
    double sup1 = 0.0, sup2 = 0.0;
    for (double m : m1) sup1 = std::max(sup1, std::abs(m - 1.0));
    for (double m : m2) sup2 = std::max(sup2, std::abs(m - 1.0));

    json report;
    report["potential"] = spec.label();
    report["beta"] = beta;
    report["bins"] = cfg.solver.bins;
    report["iterations"] = pair.iterations;
    report["residual"] = pair.residual;
    report["tv_from_uniform"] = tv;
    report["marginal1_sup_error"] = sup1;
    report["marginal2_sup_error"] = sup2;
    out.json_file("report.json", report);
}

void run_fokker_planck(const ExperimentConfig& cfg, ArtifactWriter& out) {
    const PotentialSpec spec = cfg.potential.build();
    const double beta = cfg.simulation.beta;
    const auto& fp = cfg.fokker_planck;

    const auto surface = free_energy_2d(spec, beta, fp.bins, cfg.grids.quadrature_points);
    const auto pair = solve_stationary_pair(surface, beta, 1e-12, 100000);
    const auto psi_inf = pair.stationary_density(surface);
    const double h = 1.0 / fp.bins;
    std::vector<double> p1_ref(fp.bins), p2_ref(fp.bins);
    for (int i = 0; i < fp.bins; ++i) {
        p1_ref[i] = (pair.a_inf1[(i + 1) % fp.bins] - pair.a_inf1[i]) / h;
        p2_ref[i] = (pair.a_inf2[(i + 1) % fp.bins] - pair.a_inf2[i]) / h;
    }

    FpOptions options;
    options.bins = fp.bins;
    options.beta = beta;
    options.dt = fp.dt;
    options.t_final = fp.t_final;
    options.adaptive = fp.adaptive;
    options.snapshot_every = fp.snapshot_every;
    if (!fp.adaptive) {
        options.frozen_bias1 = pair.a_inf1;
        options.frozen_bias2 = pair.a_inf2;
    }

    const DensityField2D initial = make_initial_density(fp, spec, beta);
    FpSeries series;
    bool ck_all_ok = true;
    const auto result = evolve_fokker_planck(spec, options, initial, [&](const FpSnapshot& snap) {
        series.add(snap, psi_inf, p1_ref, p2_ref);
        if (series.ck_ok.back() == 0.0) ck_all_ok = false;
    });

    out.csv("entropy.csv",
            {"t", "H", "I", "H_M1", "H_M2", "A1_err_sq", "A2_err_sq", "ck_l1", "ck_bound", "ck_ok"},
            {series.t, series.entropy, series.fisher, series.h_m1, series.h_m2, series.a1_err,
             series.a2_err, series.ck_l1, series.ck_bound, series.ck_ok});

    const auto& final_psi = result.final_state.psi;
    std::vector<double> z1, z2, v;
    PeriodicGrid1D grid(fp.bins);
    for (int i = 0; i < fp.bins; ++i) {
        for (int j = 0; j < fp.bins; ++j) {
            z1.push_back(grid.center(i));
            z2.push_back(grid.center(j));
            v.push_back(final_psi.at(i, j));
        }
    }
    out.csv("psi_final.csv", {"z1", "z2", "value"}, {z1, z2, v});
    out.pgm("psi_final.pgm", fp.bins, fp.bins, final_psi.values(), {});

    ConvergenceReport report = diagnose_potential(spec, beta);
    auto fit_series = [&](const std::string& name, const std::vector<double>& s) {
        bool positive = true;
        for (double val : s) positive = positive && val > 0.0;
        if (!positive) return;
        auto [lo, hi] = fp.fit_end > fp.fit_begin
                            ? std::pair<double, double>{fp.fit_begin, fp.fit_end}
                            : auto_fit_window(series.t, s);
        try {
            report.fitted_rates[name] = fit_decay_rate(series.t, s, lo, hi);
        } catch (const std::invalid_argument&) {
            // series too short or not decaying; leave unfitted
        }
    };
    fit_series("H", series.entropy);
    fit_series("H_M1", series.h_m1);
    fit_series("H_M2", series.h_m2);
    fit_series("A1_err_sq", series.a1_err);
    fit_series("A2_err_sq", series.a2_err);

    json jreport = report_to_json(report);
    jreport["potential"] = spec.label();
    jreport["beta"] = beta;
    jreport["bins"] = fp.bins;
    jreport["dt"] = result.dt;
    jreport["stable_dt"] = result.stable_dt;
    jreport["steps"] = result.steps;
    jreport["adaptive"] = fp.adaptive;
    jreport["csiszar_kullback_all_ok"] = ck_all_ok;
    jreport["solver_residual"] = pair.residual;
    out.json_file("convergence_report.json", jreport);
    if (!ck_all_ok) {
        throw std::runtime_error("fokker_planck: Csiszar-Kullback check failed at a snapshot");
    }
}

void run_sampling(const ExperimentConfig& cfg, ArtifactWriter& out) {
    const PotentialSpec spec = cfg.potential.build();
    SimulationConfig sim = cfg.simulation;
    sim.validate();
    const int n = spec.dimension();

    if (cfg.experiment == ExperimentKind::unbiased) {
        EnsembleState state = EnsembleState::uniform_random(sim.replicas, n, sim.seed);
        JointHistogram2D hist{PeriodicGrid1D(cfg.grids.surface_bins),
                              PeriodicGrid1D(cfg.grids.surface_bins)};
        const bool histogram = n >= 2;
        for (long long s = 0; s < sim.steps; ++s) {
            step_unbiased(state, spec, sim);
            if (histogram) {
                for (int r = 0; r < sim.replicas; ++r) {
                    auto x = state.replica(r);
                    hist.add(x[0], x[1]);
                }
            }
        }
        if (histogram) {
            std::vector<double> z1, z2, c;
            for (int i = 0; i < cfg.grids.surface_bins; ++i) {
                for (int j = 0; j < cfg.grids.surface_bins; ++j) {
                    z1.push_back(hist.grid1().center(i));
                    z2.push_back(hist.grid2().center(j));
                    c.push_back(hist.count(i, j));
                }
            }
            out.csv("histogram.csv", {"z1", "z2", "count"}, {z1, z2, c});
        }
        json report;
        report["potential"] = spec.label();
        report["steps"] = sim.steps;
        report["replicas"] = sim.replicas;
        out.json_file("report.json", report);
        return;
    }

    const CoordinateSet coords = cfg.build_coordinates();

    if (cfg.experiment == ExperimentKind::tensor_abf) {
        BiasGroupSet bias;
        PeriodicGrid1D bias_grid(cfg.grids.bias_bins);
        for (const auto& group : coords.groups()) {
            if (group.size() == 1) {
                bias.add_singleton(bias_grid);
            } else {
                bias.add_pair(bias_grid, bias_grid);
            }
        }
        EnsembleState state = EnsembleState::uniform_random(sim.replicas, n, sim.seed);
        const bool collect_f = coords.size() == 2;
        BiasGrid2D f_grid(bias_grid, bias_grid);
        // The mean-force field is accrued over the second half of the run,
        // after the bias has had time to settle.
        const long long collect_from = sim.steps / 2;
        for (long long s = 0; s < sim.steps; ++s) {
            step_tensor_abf(state, spec, coords, bias, sim,
                            collect_f && s >= collect_from ? &f_grid : nullptr);
        }
        json report;
        report["potential"] = spec.label();
        report["steps"] = sim.steps;
        report["replicas"] = sim.replicas;
        json residuals = json::array();
        for (int g = 0; g < bias.group_count(); ++g) {
            if (bias.arity(g) != 1) continue;
            const int c = coords.groups()[g][0];
            const auto& grid = bias.grid1d(g);
            write_bias_grid(out, "bias_grid_" + std::to_string(c + 1) + ".csv", grid);
            residuals.push_back(grid.periodicity_residual());
            try {
                write_bias_function(out, "bias_potential_" + std::to_string(c + 1) + ".csv",
                                    grid.integrate_bias());
            } catch (const ConvergenceError&) {
                // empty bins; the grid CSV still records what was sampled
            }
        }
        for (int g = 0; g < bias.group_count(); ++g) {
            if (bias.arity(g) == 2) write_field_grid(out, "bias_grid2d.csv", bias.grid2d(g));
        }
        report["periodicity_residuals"] = residuals;
        out.json_file("bias_snapshot.json", grid_snapshot_json(cfg, bias, coords));
        if (collect_f) {
            write_field_grid(out, "f_grid.csv", f_grid);
            const auto field = estimate_gradient_field(f_grid);
            try {
                GradientIntegrationReport integ;
                const auto recon = integrate_gradient_2d(field, &integ);
                write_surface(out, "surface_from_gradient", recon);
                report["curl_rms"] = integ.curl_rms;
                report["cg_iterations"] = integ.cg_iterations;
            } catch (const std::invalid_argument& e) {
                report["surface_from_gradient_error"] = e.what();
            }
        }
        out.json_file("report.json", report);
        return;
    }

    if (cfg.experiment == ExperimentKind::standard_abf ||
        cfg.experiment == ExperimentKind::seeded_abf) {
        PeriodicGrid1D bias_grid(cfg.grids.bias_bins);
        BiasGrid2D grid(bias_grid, bias_grid);
        json linkage;
        if (cfg.experiment == ExperimentKind::seeded_abf) {
            const fs::path input(cfg.input_dir);
            const auto field = load_gradient_field(input / "f_grid.csv");
            if (field.grid1.bins() != cfg.grids.bias_bins) {
                throw ConfigError("seeded_abf: input f_grid bins do not match bias_bins");
            }
            grid = seed_standard_abf(field);
            linkage["input_dir"] = cfg.input_dir;
            if (fs::exists(input / "manifest.json")) {
                linkage["input_manifest_hash"] = hash_file(input / "manifest.json");
            }
        }
        EnsembleState state = EnsembleState::uniform_random(sim.replicas, n, sim.seed);
        for (long long s = 0; s < sim.steps; ++s) {
            step_standard_abf(state, spec, coords, grid, sim);
        }
        write_field_grid(out, "f_grid.csv", grid);
        json report;
        report["potential"] = spec.label();
        report["steps"] = sim.steps;
        report["replicas"] = sim.replicas;
        if (!linkage.empty()) report["seeding"] = linkage;
        const auto field = estimate_gradient_field(grid);
        try {
            GradientIntegrationReport integ;
            const auto recon = integrate_gradient_2d(field, &integ);
            write_surface(out, "surface", recon);
            report["curl_rms"] = integ.curl_rms;
            report["cg_iterations"] = integ.cg_iterations;
        } catch (const std::invalid_argument& e) {
            report["surface_error"] = e.what();
        }
        out.json_file("report.json", report);
        json extra;
        if (!linkage.empty()) extra["seeding"] = linkage;
        out.finalize(cfg, extra);
        return;  // finalize handled here because of the linkage record
    }

    throw ConfigError("run_sampling: unsupported experiment");
}

void run_diagnose(const ExperimentConfig& cfg, ArtifactWriter& out) {
    const PotentialSpec spec = cfg.potential.build();
    const auto report = diagnose_potential(spec, cfg.simulation.beta);
    json j = report_to_json(report);
    j["potential"] = spec.label();
    j["beta"] = cfg.simulation.beta;
    out.json_file("convergence_report.json", j);
}

}  // namespace

DensityField2D make_initial_density(const FokkerPlanckConfig& fp, const PotentialSpec& spec,
                                    double beta) {
    DensityField2D psi(fp.bins, fp.bins, 1.0);
    PeriodicGrid1D grid(fp.bins);
    if (fp.initial == "uniform") {
        return psi;
    }
    if (fp.initial == "one_plus_cosine") {
        if (std::abs(fp.initial_amplitude) >= 1.0) {
            throw ConfigError("one_plus_cosine amplitude must satisfy |a| < 1");
        }
        const int axis = fp.initial_axis - 1;
        if (axis != 0 && axis != 1) throw ConfigError("initial_axis must be 1 or 2");
        for (int i = 0; i < fp.bins; ++i) {
            for (int j = 0; j < fp.bins; ++j) {
                const double z = axis == 0 ? grid.center(i) : grid.center(j);
                psi.at(i, j) = 1.0 + fp.initial_amplitude * std::cos(2.0 * M_PI * z);
            }
        }
        psi.normalize();
        return psi;
    }
    if (fp.initial == "gibbs") {
        std::vector<double> x(2);
        for (int i = 0; i < fp.bins; ++i) {
            x[0] = grid.center(i);
            for (int j = 0; j < fp.bins; ++j) {
                x[1] = grid.center(j);
                psi.at(i, j) = std::exp(-beta * spec.evaluate(x));
            }
        }
        psi.normalize();
        return psi;
    }
    if (fp.initial == "stationary") {
        const auto surface = free_energy_2d(spec, beta, fp.bins);
        const auto pair = solve_stationary_pair(surface, beta, 1e-12, 100000);
        return pair.stationary_density(surface);
    }
    throw ConfigError("unknown initial density '" + fp.initial + "'");
}

GradientField2D load_gradient_field(const std::filesystem::path& csv_path) {
    const CsvTable table = read_csv(csv_path);
    if (table.header != std::vector<std::string>{"z1", "z2", "count", "mean_f1", "mean_f2"}) {
        throw std::runtime_error("load_gradient_field: unexpected columns in " +
                                 csv_path.string());
    }
    const size_t rows = table.columns.front().size();
    const int bins = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rows))));
    if (static_cast<size_t>(bins) * bins != rows) {
        throw std::runtime_error("load_gradient_field: grid is not square in " +
                                 csv_path.string());
    }
    GradientField2D field{PeriodicGrid1D(bins), PeriodicGrid1D(bins)};
    for (size_t r = 0; r < rows; ++r) {
        const int k1 = field.grid1.bin_of(table.columns[0][r]);
        const int k2 = field.grid2.bin_of(table.columns[1][r]);
        const int k = field.index(k1, k2);
        field.count[k] = static_cast<long long>(std::llround(table.columns[2][r]));
        field.f1[k] = table.columns[3][r];
        field.f2[k] = table.columns[4][r];
    }
    return field;
}

void run_experiment(const ExperimentConfig& cfg) {
    ArtifactWriter out{fs::path(cfg.output_dir)};
    switch (cfg.experiment) {
        case ExperimentKind::oracle_tables:
            run_oracle_tables(cfg, out);
            break;
        case ExperimentKind::stationary_solver:
            run_stationary_solver(cfg, out);
            break;
        case ExperimentKind::fokker_planck:
            run_fokker_planck(cfg, out);
            break;
        case ExperimentKind::diagnose:
            run_diagnose(cfg, out);
            break;
        case ExperimentKind::unbiased:
        case ExperimentKind::tensor_abf:
            run_sampling(cfg, out);
            break;
        case ExperimentKind::standard_abf:
        case ExperimentKind::seeded_abf:
            run_sampling(cfg, out);
            return;  // run_sampling finalizes these itself
    }
    out.finalize(cfg);
}

DiffReport diff_artifacts(const fs::path& dir_a, const fs::path& dir_b) {
    auto list_csvs = [](const fs::path& dir) {
        std::set<std::string> names;
        if (!fs::exists(dir / "manifest.json")) {
            throw std::runtime_error("diff: no manifest.json in " + dir.string());
        }
        std::ifstream in(dir / "manifest.json");
        json manifest;
        in >> manifest;
        for (const auto& f : manifest.at("files")) {
            const std::string name = f.at("name").get<std::string>();
            if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") names.insert(name);
        }
        return names;
    };
    const auto names_a = list_csvs(dir_a);
    const auto names_b = list_csvs(dir_b);
    DiffReport report;
    for (const auto& name : names_a) {
        if (!names_b.count(name)) report.only_in_a.push_back(name);
    }
    for (const auto& name : names_b) {
        if (!names_a.count(name)) report.only_in_b.push_back(name);
    }
    for (const auto& name : names_a) {
        if (!names_b.count(name)) continue;
        const CsvTable a = read_csv(dir_a / name);
        const CsvTable b = read_csv(dir_b / name);
        if (a.header != b.header ||
            (a.columns.size() && b.columns.size() &&
             a.columns.front().size() != b.columns.front().size())) {
            throw std::runtime_error("diff: shape mismatch for " + name);
        }
        DiffEntry entry;
        entry.file = name;
        double sq = 0.0;
        for (size_t c = 0; c < a.columns.size(); ++c) {
            for (size_t r = 0; r < a.columns[c].size(); ++r) {
                const double d = a.columns[c][r] - b.columns[c][r];
                sq += d * d;
                entry.max = std::max(entry.max, std::abs(d));
                ++entry.values;
            }
        }
        entry.rms = entry.values ? std::sqrt(sq / static_cast<double>(entry.values)) : 0.0;
        report.entries.push_back(entry);
    }
    return report;
}

}  // namespace tabf
