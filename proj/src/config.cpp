#include "tabf/config.hpp"

#include <fstream>
#include <set>

#include "tabf/errors.hpp"
#include "tabf/io.hpp"

namespace tabf {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw ConfigError("config section '" + section + "' must be an object");
    }
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!ok.count(item.key())) {
            throw ConfigError("unknown key '" + item.key() + "' in config section '" + section +
                              "'");
        }
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config key '" + std::string(key) + "': " + e.what());
    }
}

BiasMode bias_mode_from_string(const std::string& s) {
    if (s == "none") return BiasMode::none;
    if (s == "standard_abf") return BiasMode::standard_abf;
    if (s == "tensor_abf") return BiasMode::tensor_abf;
    throw ConfigError("unknown bias_mode '" + s + "'");
}

std::string to_string(BiasMode mode) {
    switch (mode) {
        case BiasMode::none: return "none";
        case BiasMode::standard_abf: return "standard_abf";
        case BiasMode::tensor_abf: return "tensor_abf";
    }
    return "none";
}

EstimatorMode estimator_mode_from_string(const std::string& s) {
    if (s == "time_average") return EstimatorMode::time_average;
    if (s == "ensemble_average") return EstimatorMode::ensemble_average;
    throw ConfigError("unknown estimator_mode '" + s + "'");
}

std::string to_string(EstimatorMode mode) {
    return mode == EstimatorMode::time_average ? "time_average" : "ensemble_average";
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::unbiased: return "unbiased";
        case ExperimentKind::tensor_abf: return "tensor_abf";
        case ExperimentKind::standard_abf: return "standard_abf";
        case ExperimentKind::seeded_abf: return "seeded_abf";
        case ExperimentKind::fokker_planck: return "fokker_planck";
        case ExperimentKind::stationary_solver: return "stationary_solver";
        case ExperimentKind::oracle_tables: return "oracle_tables";
        case ExperimentKind::diagnose: return "diagnose";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    for (auto kind : {ExperimentKind::unbiased, ExperimentKind::tensor_abf,
                      ExperimentKind::standard_abf, ExperimentKind::seeded_abf,
                      ExperimentKind::fokker_planck, ExperimentKind::stationary_solver,
                      ExperimentKind::oracle_tables, ExperimentKind::diagnose}) {
        if (to_string(kind) == name) return kind;
    }
    throw ConfigError("unknown experiment '" + name + "'");
}

PotentialSpec PotentialConfig::build() const {
    if (family == "terms") {
        return PotentialSpec(dimension, terms, "terms");
    }
    return potential_from_family(family, parameter);
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    check_keys(j, "<root>",
               {"experiment", "potential", "coordinates", "groups", "grids", "simulation",
                "fokker_planck", "solver", "output_dir", "input_dir"});
    ExperimentConfig cfg;
    if (!j.contains("experiment")) throw ConfigError("config needs an 'experiment' key");
    cfg.experiment = experiment_kind_from_string(j.at("experiment").get<std::string>());

    if (!j.contains("potential")) throw ConfigError("config needs a 'potential' section");
    {
        const json& p = j.at("potential");
        check_keys(p, "potential", {"family", "parameter", "dimension", "terms"});
        cfg.potential.family = get_or<std::string>(p, "family", "");
        if (cfg.potential.family.empty()) {
            throw ConfigError("potential section needs a 'family'");
        }
        cfg.potential.parameter = get_or<double>(p, "parameter", 0.0);
        cfg.potential.dimension = get_or<int>(p, "dimension", 2);
        if (p.contains("terms")) {
            for (const json& t : p.at("terms")) {
                check_keys(t, "potential.terms[]", {"amplitude", "wavevector", "phase"});
                CosineTerm term;
                term.amplitude = get_or<double>(t, "amplitude", 0.0);
                term.wavevector = get_or<std::vector<int>>(t, "wavevector", {});
                term.phase = get_or<std::vector<double>>(t, "phase", {});
                cfg.potential.terms.push_back(std::move(term));
            }
        }
        if (cfg.potential.family == "terms" && cfg.potential.terms.empty()) {
            throw ConfigError("potential family 'terms' needs a nonempty 'terms' list");
        }
    }

    if (j.contains("coordinates")) {
        for (const json& c : j.at("coordinates")) {
            check_keys(c, "coordinates[]", {"kind", "axis", "coefficients"});
            CoordinateConfig cc;
            cc.kind = get_or<std::string>(c, "kind", "");
            cc.axis = get_or<int>(c, "axis", 1);
            cc.coefficients = get_or<std::vector<int>>(c, "coefficients", {});
            if (cc.kind != "projection" && cc.kind != "integer_combination") {
                throw ConfigError("coordinate kind must be 'projection' or 'integer_combination'");
            }
            cfg.coordinates.push_back(std::move(cc));
        }
    }
    if (j.contains("groups")) {
        cfg.groups = j.at("groups").get<std::vector<std::vector<int>>>();
    }

    if (j.contains("grids")) {
        const json& g = j.at("grids");
        check_keys(g, "grids", {"bias_bins", "surface_bins", "oracle_bins", "quadrature_points"});
        cfg.grids.bias_bins = get_or<int>(g, "bias_bins", cfg.grids.bias_bins);
        cfg.grids.surface_bins = get_or<int>(g, "surface_bins", cfg.grids.surface_bins);
        cfg.grids.oracle_bins = get_or<int>(g, "oracle_bins", cfg.grids.oracle_bins);
        cfg.grids.quadrature_points = get_or<int>(g, "quadrature_points", 0);
    }

    if (j.contains("simulation")) {
        const json& s = j.at("simulation");
        check_keys(s, "simulation",
                   {"beta", "dt", "steps", "replicas", "seed", "bias_mode", "ramp_threshold",
                    "estimator_mode", "displacement_cap", "threads", "noise_off", "coupled_form"});
        cfg.simulation.beta = get_or<double>(s, "beta", 1.0);
        cfg.simulation.dt = get_or<double>(s, "dt", 1e-4);
        cfg.simulation.steps = get_or<long long>(s, "steps", 0);
        cfg.simulation.replicas = get_or<int>(s, "replicas", 1);
        cfg.simulation.seed = get_or<std::uint64_t>(s, "seed", 0);
        cfg.simulation.bias_mode = bias_mode_from_string(get_or<std::string>(s, "bias_mode", "none"));
        cfg.simulation.ramp_threshold = get_or<long long>(s, "ramp_threshold", 100);
        cfg.simulation.estimator_mode =
            estimator_mode_from_string(get_or<std::string>(s, "estimator_mode", "time_average"));
        cfg.simulation.displacement_cap = get_or<double>(s, "displacement_cap", 0.25);
        cfg.simulation.threads = get_or<int>(s, "threads", 1);
        cfg.simulation.noise_off = get_or<bool>(s, "noise_off", false);
        cfg.simulation.coupled_form = get_or<bool>(s, "coupled_form", false);
        cfg.simulation.validate();
    }

    if (j.contains("fokker_planck")) {
        const json& f = j.at("fokker_planck");
        check_keys(f, "fokker_planck",
                   {"bins", "dt", "t_final", "adaptive", "initial", "initial_axis",
                    "initial_amplitude", "snapshot_every", "fit_begin", "fit_end"});
        cfg.fokker_planck.bins = get_or<int>(f, "bins", 128);
        cfg.fokker_planck.dt = get_or<double>(f, "dt", 0.0);
        cfg.fokker_planck.t_final = get_or<double>(f, "t_final", 0.1);
        cfg.fokker_planck.adaptive = get_or<bool>(f, "adaptive", true);
        cfg.fokker_planck.initial = get_or<std::string>(f, "initial", "uniform");
        cfg.fokker_planck.initial_axis = get_or<int>(f, "initial_axis", 1);
        cfg.fokker_planck.initial_amplitude = get_or<double>(f, "initial_amplitude", 0.5);
        cfg.fokker_planck.snapshot_every = get_or<long long>(f, "snapshot_every", 50);
        cfg.fokker_planck.fit_begin = get_or<double>(f, "fit_begin", 0.0);
        cfg.fokker_planck.fit_end = get_or<double>(f, "fit_end", 0.0);
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, "solver", {"bins", "tol", "max_iter"});
        cfg.solver.bins = get_or<int>(s, "bins", 128);
        cfg.solver.tol = get_or<double>(s, "tol", 1e-10);
        cfg.solver.max_iter = get_or<int>(s, "max_iter", 20000);
    }

    cfg.output_dir = get_or<std::string>(j, "output_dir", "out");
    cfg.input_dir = get_or<std::string>(j, "input_dir", "");

    if (cfg.experiment == ExperimentKind::seeded_abf && cfg.input_dir.empty()) {
        throw ConfigError("seeded_abf needs 'input_dir' pointing at a tensor_abf artifact dir");
    }
    return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = to_string(experiment);
    json p;
    p["family"] = potential.family;
    p["parameter"] = potential.parameter;
    p["dimension"] = potential.dimension;
    if (!potential.terms.empty()) {
        json terms = json::array();
        for (const auto& t : potential.terms) {
            json jt;
            jt["amplitude"] = t.amplitude;
            jt["wavevector"] = t.wavevector;
            jt["phase"] = t.phase;
            terms.push_back(jt);
        }
        p["terms"] = terms;
    }
    j["potential"] = p;
    if (!coordinates.empty()) {
        json cs = json::array();
        for (const auto& c : coordinates) {
            json jc;
            jc["kind"] = c.kind;
            if (c.kind == "projection") jc["axis"] = c.axis;
            if (!c.coefficients.empty()) jc["coefficients"] = c.coefficients;
            cs.push_back(jc);
        }
        j["coordinates"] = cs;
        if (!groups.empty()) j["groups"] = groups;
    }
    json g;
    g["bias_bins"] = grids.bias_bins;
    g["surface_bins"] = grids.surface_bins;
    g["oracle_bins"] = grids.oracle_bins;
    g["quadrature_points"] = grids.quadrature_points;
    j["grids"] = g;
    json s;
    s["beta"] = simulation.beta;
    s["dt"] = simulation.dt;
    s["steps"] = simulation.steps;
    s["replicas"] = simulation.replicas;
    s["seed"] = simulation.seed;
    s["bias_mode"] = to_string(simulation.bias_mode);
    s["ramp_threshold"] = simulation.ramp_threshold;
    s["estimator_mode"] = to_string(simulation.estimator_mode);
    s["displacement_cap"] = simulation.displacement_cap;
    s["threads"] = simulation.threads;
    s["noise_off"] = simulation.noise_off;
    s["coupled_form"] = simulation.coupled_form;
    j["simulation"] = s;
    json f;
    f["bins"] = fokker_planck.bins;
    f["dt"] = fokker_planck.dt;
    f["t_final"] = fokker_planck.t_final;
    f["adaptive"] = fokker_planck.adaptive;
    f["initial"] = fokker_planck.initial;
    f["initial_axis"] = fokker_planck.initial_axis;
    f["initial_amplitude"] = fokker_planck.initial_amplitude;
    f["snapshot_every"] = fokker_planck.snapshot_every;
    f["fit_begin"] = fokker_planck.fit_begin;
    f["fit_end"] = fokker_planck.fit_end;
    j["fokker_planck"] = f;
    json so;
    so["bins"] = solver.bins;
    so["tol"] = solver.tol;
    so["max_iter"] = solver.max_iter;
    j["solver"] = so;
    j["output_dir"] = output_dir;
    if (!input_dir.empty()) j["input_dir"] = input_dir;
    return j;
}

std::string ExperimentConfig::hash() const { return hash_string(to_json().dump()); }

CoordinateSet ExperimentConfig::build_coordinates() const {
    if (coordinates.empty()) {
        throw ConfigError("this experiment needs a 'coordinates' section");
    }
    const int n = potential.family == "terms" ? potential.dimension : 2;
    std::vector<ReactionCoordinate> rcs;
    for (const auto& c : coordinates) {
        if (c.kind == "projection") {
            if (c.axis < 1 || c.axis > n) {
                throw ConfigError("projection axis " + std::to_string(c.axis) +
                                  " out of range for dimension " + std::to_string(n));
            }
            rcs.push_back(ReactionCoordinate::projection(n, c.axis - 1));
        } else {
            if (static_cast<int>(c.coefficients.size()) != n) {
                throw ConfigError("integer_combination needs exactly " + std::to_string(n) +
                                  " coefficients");
            }
            rcs.push_back(ReactionCoordinate::integer_combination(c.coefficients));
        }
    }
    std::vector<std::vector<int>> zero_based;
    for (const auto& g : groups) {
        std::vector<int> zg;
        for (int i : g) zg.push_back(i - 1);
        zero_based.push_back(std::move(zg));
    }
    return CoordinateSet(std::move(rcs), std::move(zero_based));
}

}  // namespace tabf
