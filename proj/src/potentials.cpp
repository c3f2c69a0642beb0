#include "tabf/potentials.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tabf {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

PotentialSpec::PotentialSpec(int dimension, std::vector<CosineTerm> terms, std::string label)
    : dimension_(dimension), terms_(std::move(terms)), label_(std::move(label)) {
    if (dimension_ < 1) {
        throw std::invalid_argument("PotentialSpec: dimension must be >= 1");
    }
    for (auto& term : terms_) {
        if (static_cast<int>(term.wavevector.size()) != dimension_) {
            throw std::invalid_argument("PotentialSpec '" + label_ +
                                        "': wavevector length must equal dimension");
        }
        if (term.phase.empty()) {
            term.phase.assign(dimension_, 0.0);
        } else if (static_cast<int>(term.phase.size()) != dimension_) {
            throw std::invalid_argument("PotentialSpec '" + label_ +
                                        "': phase length must equal dimension");
        }
    }
}

void PotentialSpec::check_dimension(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension_) {
        throw std::invalid_argument("PotentialSpec '" + label_ + "': expected dimension " +
                                    std::to_string(dimension_) + ", got point of dimension " +
                                    std::to_string(x.size()));
    }
}

double PotentialSpec::evaluate(std::span<const double> x) const {
    check_dimension(x);
    double v = 0.0;
    for (const auto& term : terms_) {
        double prod = term.amplitude;
        for (int i = 0; i < dimension_; ++i) {
            if (term.wavevector[i] == 0 && term.phase[i] == 0.0) continue;
            prod *= std::cos(kTwoPi * term.wavevector[i] * x[i] + term.phase[i]);
        }
        v += prod;
    }
    return v;
}

void PotentialSpec::gradient(std::span<const double> x, std::span<double> out) const {
    check_dimension(x);
    if (out.size() != x.size()) {
        throw std::invalid_argument("PotentialSpec::gradient: output span size mismatch");
    }
    for (auto& g : out) g = 0.0;
    for (const auto& term : terms_) {
        for (int j = 0; j < dimension_; ++j) {
            if (term.wavevector[j] == 0) continue;
            double d = term.amplitude * (-kTwoPi * term.wavevector[j]) *
                       std::sin(kTwoPi * term.wavevector[j] * x[j] + term.phase[j]);
            for (int i = 0; i < dimension_; ++i) {
                if (i == j) continue;
                if (term.wavevector[i] == 0 && term.phase[i] == 0.0) continue;
                d *= std::cos(kTwoPi * term.wavevector[i] * x[i] + term.phase[i]);
            }
            out[j] += d;
        }
    }
}

std::vector<double> PotentialSpec::gradient(const TorusPoint& x) const {
    std::vector<double> g(dimension_);
    gradient(x.coords(), g);
    return g;
}

double PotentialSpec::partial(std::span<const double> x, int axis) const {
    check_dimension(x);
    double d = 0.0;
    for (const auto& term : terms_) {
        if (term.wavevector[axis] == 0) continue;
        double t = term.amplitude * (-kTwoPi * term.wavevector[axis]) *
                   std::sin(kTwoPi * term.wavevector[axis] * x[axis] + term.phase[axis]);
        for (int i = 0; i < dimension_; ++i) {
            if (i == axis) continue;
            if (term.wavevector[i] == 0 && term.phase[i] == 0.0) continue;
            t *= std::cos(kTwoPi * term.wavevector[i] * x[i] + term.phase[i]);
        }
        d += t;
    }
    return d;
}

double PotentialSpec::mixed_second(std::span<const double> x, int i, int j) const {
    check_dimension(x);
    if (i == j) {
        throw std::invalid_argument("PotentialSpec::mixed_second: axes must differ");
    }
    double d = 0.0;
    for (const auto& term : terms_) {
        if (term.wavevector[i] == 0 || term.wavevector[j] == 0) continue;
        double t = term.amplitude;
        t *= -kTwoPi * term.wavevector[i] *
             std::sin(kTwoPi * term.wavevector[i] * x[i] + term.phase[i]);
        t *= -kTwoPi * term.wavevector[j] *
             std::sin(kTwoPi * term.wavevector[j] * x[j] + term.phase[j]);
        for (int l = 0; l < dimension_; ++l) {
            if (l == i || l == j) continue;
            if (term.wavevector[l] == 0 && term.phase[l] == 0.0) continue;
            t *= std::cos(kTwoPi * term.wavevector[l] * x[l] + term.phase[l]);
        }
        d += t;
    }
    return d;
}

bool PotentialSpec::mixes(int axis) const {
    for (const auto& term : terms_) {
        if (term.wavevector[axis] == 0) continue;
        for (int i = 0; i < dimension_; ++i) {
            if (i != axis && term.wavevector[i] != 0) return true;
        }
    }
    return false;
}

double PotentialSpec::gradient_bound() const {
    double bound = 0.0;
    for (int j = 0; j < dimension_; ++j) {
        double comp = 0.0;
        for (const auto& term : terms_) {
            comp += std::abs(term.amplitude) * kTwoPi * std::abs(term.wavevector[j]);
        }
        bound = std::max(bound, comp);
    }
    return bound;
}

PotentialSpec constant_potential(int dimension) {
    return PotentialSpec(dimension, {}, "constant");
}

PotentialSpec decoupled_double_well() {
    std::vector<CosineTerm> terms = {
        {1.0, {2, 0}, {}},
        {1.0, {0, 2}, {}},
    };
    return PotentialSpec(2, std::move(terms), "decoupled_double_well");
}

PotentialSpec coupled_double_well(double eps_c) {
    std::vector<CosineTerm> terms = {
        {1.0, {2, 0}, {}},
        {1.0, {0, 2}, {}},
        {eps_c, {1, -1}, {}},
    };
    return PotentialSpec(2, std::move(terms),
                         "coupled_double_well(" + std::to_string(eps_c) + ")");
}

PotentialSpec diagonal_channel(double kappa_c) {
    std::vector<CosineTerm> terms = {
        {0.5, {2, 0}, {}},
        {0.5, {0, 2}, {}},
        {-kappa_c, {1, -1}, {}},
    };
    return PotentialSpec(2, std::move(terms), "diagonal_channel(" + std::to_string(kappa_c) + ")");
}

PotentialSpec potential_from_family(const std::string& family, double parameter) {
    if (family == "constant") return constant_potential(2);
    if (family == "decoupled_double_well") return decoupled_double_well();
    if (family == "coupled_double_well") return coupled_double_well(parameter);
    if (family == "diagonal_channel") return diagonal_channel(parameter);
    throw std::invalid_argument("unknown potential family '" + family + "'");
}

CouplingConstants coupling_constants(const PotentialSpec& spec, int probe_bins) {
    const int n = spec.dimension();
    if (n < 2) {
        throw std::invalid_argument("coupling_constants: potential dimension must be >= 2");
    }
    if (probe_bins < 1) {
        throw std::invalid_argument("coupling_constants: probe_bins must be >= 1");
    }
    CouplingConstants out;
    // Exact zero when nothing couples the axis (the decoupled case).
    const bool need1 = spec.mixes(0);
    const bool need2 = spec.mixes(1);
    if (!need1 && !need2) return out;

    PeriodicGrid1D grid(probe_bins);
    std::vector<double> x(n, 0.0);
    std::vector<long> idx(n, 0);
    const long total = [&] {
        long t = 1;
        for (int i = 0; i < n; ++i) t *= probe_bins;
        return t;
    }();
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        for (int i = n - 1; i >= 0; --i) {
            idx[i] = rem % probe_bins;
            rem /= probe_bins;
        }
        for (int i = 0; i < n; ++i) x[i] = grid.center(static_cast<int>(idx[i]));
        if (need1) {
            double norm_sq = 0.0;
            for (int j = 1; j < n; ++j) {
                const double m = spec.mixed_second(x, 0, j);
                norm_sq += m * m;
            }
            out.kappa1 = std::max(out.kappa1, std::sqrt(norm_sq));
        }
        if (need2) {
            double norm_sq = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j == 1) continue;
                const double m = spec.mixed_second(x, 1, j);
                norm_sq += m * m;
            }
            out.kappa2 = std::max(out.kappa2, std::sqrt(norm_sq));
        }
    }
    return out;
}

}  // namespace tabf
