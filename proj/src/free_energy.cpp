#include "tabf/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "tabf/errors.hpp"

namespace tabf {

FreeEnergySurface2D::FreeEnergySurface2D(PeriodicGrid1D grid1, PeriodicGrid1D grid2)
    : grid1_(grid1), grid2_(grid2),
      value_(static_cast<size_t>(grid1.bins()) * grid2.bins(), 0.0),
      visited_(value_.size(), 0) {}

void FreeEnergySurface2D::set(int k1, int k2, double v) {
    value_[index(k1, k2)] = v;
    visited_[index(k1, k2)] = 1;
}

void FreeEnergySurface2D::mask(int k1, int k2) {
    value_[index(k1, k2)] = 0.0;
    visited_[index(k1, k2)] = 0;
}

int FreeEnergySurface2D::visited_count() const {
    int c = 0;
    for (auto v : visited_) c += v;
    return c;
}

void FreeEnergySurface2D::anchor() {
    double lo = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < value_.size(); ++k) {
        if (visited_[k]) lo = std::min(lo, value_[k]);
    }
    if (!std::isfinite(lo)) return;  // nothing visited
    for (size_t k = 0; k < value_.size(); ++k) {
        if (visited_[k]) value_[k] -= lo;
    }
}

GradientField2D::GradientField2D(PeriodicGrid1D g1, PeriodicGrid1D g2)
    : grid1(g1), grid2(g2),
      f1(static_cast<size_t>(g1.bins()) * g2.bins(), 0.0),
      f2(f1.size(), 0.0),
      count(f1.size(), 0) {}

FreeEnergySurface2D reconstruct_histogram(const JointHistogram2D& hist, const BiasFunction1D& a1,
                                          const BiasFunction1D& a2, double beta) {
    const double total = hist.total();
    if (total <= 0.0) {
        throw std::invalid_argument("reconstruct_histogram: histogram holds no samples");
    }
    const auto& g1 = hist.grid1();
    const auto& g2 = hist.grid2();
    const double cell_area = g1.width() * g2.width();
    FreeEnergySurface2D surface(g1, g2);
    for (int k1 = 0; k1 < g1.bins(); ++k1) {
        for (int k2 = 0; k2 < g2.bins(); ++k2) {
            const double c = hist.count(k1, k2);
            if (c <= 0.0) {
                surface.mask(k1, k2);
                continue;
            }
            const double density = c / total / cell_area;
            surface.set(k1, k2, -std::log(density) / beta + a1(g1.center(k1)) + a2(g2.center(k2)));
        }
    }
    surface.anchor();
    return surface;
}

GradientField2D estimate_gradient_field(const BiasGrid2D& f_samples) {
    GradientField2D field(f_samples.grid1(), f_samples.grid2());
    for (int k1 = 0; k1 < field.grid1.bins(); ++k1) {
        for (int k2 = 0; k2 < field.grid2.bins(); ++k2) {
            const int k = field.index(k1, k2);
            field.count[k] = f_samples.count(k1, k2);
            if (field.count[k] > 0) {
                field.f1[k] = f_samples.mean1(k1, k2);
                field.f2[k] = f_samples.mean2(k1, k2);
            }
        }
    }
    return field;
}

namespace {

void check_connected(const GradientField2D& field) {
    const int b1 = field.grid1.bins();
    const int b2 = field.grid2.bins();
    std::vector<int> component(static_cast<size_t>(b1) * b2, -1);
    int n_components = 0;
    std::vector<int> sizes;
    for (int start = 0; start < b1 * b2; ++start) {
        if (field.count[start] <= 0 || component[start] >= 0) continue;
        int size = 0;
        std::queue<int> frontier;
        frontier.push(start);
        component[start] = n_components;
        while (!frontier.empty()) {
            const int k = frontier.front();
            frontier.pop();
            ++size;
            const int i = k / b2, j = k % b2;
            const int neighbors[4] = {((i + 1) % b1) * b2 + j, ((i + b1 - 1) % b1) * b2 + j,
                                      i * b2 + (j + 1) % b2, i * b2 + (j + b2 - 1) % b2};
            for (int u : neighbors) {
                if (field.count[u] > 0 && component[u] < 0) {
                    component[u] = n_components;
                    frontier.push(u);
                }
            }
        }
        sizes.push_back(size);
        ++n_components;
    }
    if (n_components == 0) {
        throw std::invalid_argument("integrate_gradient_2d: no visited bins");
    }
    if (n_components > 1) {
        std::string msg = "integrate_gradient_2d: visited region splits into " +
                          std::to_string(n_components) + " components of sizes ";
        for (size_t i = 0; i < sizes.size(); ++i) msg += (i ? "," : "") + std::to_string(sizes[i]);
        throw std::invalid_argument(msg);
    }
}

}  // namespace

FreeEnergySurface2D integrate_gradient_2d(const GradientField2D& field,
                                          GradientIntegrationReport* report) {
    if (field.grid1.bins() != field.grid2.bins()) {
        // Rectangular grids would need anisotropic edge weights; the
        // experiments only use square grids.
        throw std::invalid_argument("integrate_gradient_2d: grid must be square");
    }
    check_connected(field);
    const int b = field.grid1.bins();
    const double h = field.grid1.width();
    const int cells = b * b;

    // Active edges: both endpoint cells visited. Edge value of the gradient
    // sample is the mean of the two adjacent cell means.
    auto visited = [&](int k) { return field.count[k] > 0; };

    std::vector<double> rhs(cells, 0.0);
    std::vector<double> diag(cells, 0.0);
    auto accumulate_edge = [&](int from, int to, double g_edge) {
        rhs[to] += g_edge / h;
        rhs[from] -= g_edge / h;
        diag[from] += 1.0 / (h * h);
        diag[to] += 1.0 / (h * h);
    };
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j < b; ++j) {
            const int k = i * b + j;
            if (!visited(k)) continue;
            const int k1 = ((i + 1) % b) * b + j;
            if (visited(k1)) accumulate_edge(k, k1, 0.5 * (field.f1[k] + field.f1[k1]));
            const int k2 = i * b + (j + 1) % b;
            if (visited(k2)) accumulate_edge(k, k2, 0.5 * (field.f2[k] + field.f2[k2]));
        }
    }

    // Graph-Laplacian apply restricted to active edges.
    auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (int i = 0; i < b; ++i) {
            for (int j = 0; j < b; ++j) {
                const int k = i * b + j;
                if (!visited(k)) continue;
                const int k1 = ((i + 1) % b) * b + j;
                if (visited(k1)) {
                    const double d = (x[k] - x[k1]) / (h * h);
                    out[k] += d;
                    out[k1] -= d;
                }
                const int k2 = i * b + (j + 1) % b;
                if (visited(k2)) {
                    const double d = (x[k] - x[k2]) / (h * h);
                    out[k] += d;
                    out[k2] -= d;
                }
            }
        }
    };

    // The system is singular with constant nullspace on the visited set;
    // keep iterates mean-free there.
    const int n_visited = [&] {
        int c = 0;
        for (int k = 0; k < cells; ++k) c += visited(k) ? 1 : 0;
        return c;
    }();
    auto project = [&](std::vector<double>& x) {
        double mean = 0.0;
        for (int k = 0; k < cells; ++k) {
            if (visited(k)) mean += x[k];
        }
        mean /= n_visited;
        for (int k = 0; k < cells; ++k) {
            if (visited(k)) x[k] -= mean;
        }
    };

    std::vector<double> x(cells, 0.0), r = rhs, z(cells, 0.0), p(cells, 0.0), ap(cells, 0.0);
    project(r);
    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (int k = 0; k < cells; ++k) out[k] = (visited(k) && diag[k] > 0.0) ? in[k] / diag[k] : 0.0;
    };
    precondition(r, z);
    p = z;
    double rz = 0.0;
    for (int k = 0; k < cells; ++k) rz += r[k] * z[k];
    double rhs_norm = 0.0;
    for (int k = 0; k < cells; ++k) rhs_norm += rhs[k] * rhs[k];
    rhs_norm = std::sqrt(rhs_norm);
    const double tol = std::max(1e-12 * rhs_norm, 1e-300);
    const int max_iter = 40 * b + 200;
    int it = 0;
    double res_norm = rhs_norm;
    for (; it < max_iter; ++it) {
        res_norm = 0.0;
        for (int k = 0; k < cells; ++k) res_norm += r[k] * r[k];
        res_norm = std::sqrt(res_norm);
        if (res_norm <= tol) break;
        apply(p, ap);
        double pap = 0.0;
        for (int k = 0; k < cells; ++k) pap += p[k] * ap[k];
        if (pap <= 0.0) break;
        const double alpha = rz / pap;
        for (int k = 0; k < cells; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        project(r);
        precondition(r, z);
        double rz_new = 0.0;
        for (int k = 0; k < cells; ++k) rz_new += r[k] * z[k];
        const double beta_cg = rz_new / rz;
        rz = rz_new;
        for (int k = 0; k < cells; ++k) p[k] = z[k] + beta_cg * p[k];
    }

    if (report) {
        report->cg_iterations = it;
        report->cg_residual = res_norm;
        double curl_sq = 0.0;
        int curl_count = 0;
        for (int i = 0; i < b; ++i) {
            for (int j = 0; j < b; ++j) {
                const int k = i * b + j;
                const int k1 = ((i + 1) % b) * b + j;
                const int k2 = i * b + (j + 1) % b;
                if (!visited(k) || !visited(k1) || !visited(k2)) continue;
                const double c = (field.f2[k1] - field.f2[k]) / h - (field.f1[k2] - field.f1[k]) / h;
                curl_sq += c * c;
                ++curl_count;
            }
        }
        report->curl_rms = curl_count > 0 ? std::sqrt(curl_sq / curl_count) : 0.0;
    }

    FreeEnergySurface2D surface(field.grid1, field.grid2);
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j < b; ++j) {
            const int k = i * b + j;
            if (visited(k)) {
                surface.set(i, j, x[k]);
            } else {
                surface.mask(i, j);
            }
        }
    }
    surface.anchor();
    return surface;
}

GradientField2D surface_gradient(const FreeEnergySurface2D& surface) {
    const int b1 = surface.bins1();
    const int b2 = surface.bins2();
    if (surface.visited_count() != b1 * b2) {
        throw std::invalid_argument("surface_gradient: surface must be fully visited");
    }
    GradientField2D field(surface.grid1(), surface.grid2());
    const double h1 = surface.grid1().width();
    const double h2 = surface.grid2().width();
    for (int i = 0; i < b1; ++i) {
        for (int j = 0; j < b2; ++j) {
            const int k = field.index(i, j);
            field.f1[k] = (surface.value((i + 1) % b1, j) - surface.value((i + b1 - 1) % b1, j)) /
                          (2.0 * h1);
            field.f2[k] = (surface.value(i, (j + 1) % b2) - surface.value(i, (j + b2 - 1) % b2)) /
                          (2.0 * h2);
            field.count[k] = 1;
        }
    }
    return field;
}

double unbiased_average(std::span<const double> xs_flat, std::span<const double> phi,
                        const BiasFunction1D& a1, const BiasFunction1D& a2,
                        const CoordinateSet& coords, double beta) {
    if (coords.size() != 2) {
        throw std::invalid_argument("unbiased_average: needs exactly two coordinates");
    }
    const int n = coords.ambient_dimension();
    if (phi.empty() || xs_flat.size() != phi.size() * static_cast<size_t>(n)) {
        throw std::invalid_argument("unbiased_average: sample arrays are inconsistent");
    }
    const size_t count = phi.size();
    std::vector<double> exponent(count);
    double max_exp = -std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < count; ++s) {
        std::span<const double> x = xs_flat.subspan(s * n, n);
        const double e = -beta * (a1(coords.coord(0).value(x)) + a2(coords.coord(1).value(x)));
        exponent[s] = e;
        max_exp = std::max(max_exp, e);
    }
    double num = 0.0, den = 0.0;
    for (size_t s = 0; s < count; ++s) {
        const double w = std::exp(exponent[s] - max_exp);
        num += phi[s] * w;
        den += w;
    }
    if (!(den > 0.0) || !std::isfinite(den)) {
        throw std::runtime_error(
            "unbiased_average: weights vanished; re-anchor the bias potentials");
    }
    return num / den;
}

BiasGrid2D seed_standard_abf(const GradientField2D& field) {
    BiasGrid2D grid(field.grid1, field.grid2);
    const size_t cells = field.count.size();
    std::vector<long long> counts(cells);
    std::vector<double> sums1(cells), sums2(cells);
    for (size_t k = 0; k < cells; ++k) {
        counts[k] = field.count[k];
        sums1[k] = field.f1[k] * static_cast<double>(field.count[k]);
        sums2[k] = field.f2[k] * static_cast<double>(field.count[k]);
    }
    grid.load(std::move(counts), std::move(sums1), std::move(sums2));
    return grid;
}

}  // namespace tabf
