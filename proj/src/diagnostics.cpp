#include "tabf/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tabf {

namespace {
constexpr double kFourPiSq = 4.0 * M_PI * M_PI;
}

double relative_entropy(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size() || p.empty()) {
        throw std::invalid_argument("relative_entropy: densities must share a nonempty grid");
    }
    double sum = 0.0;
    for (size_t k = 0; k < p.size(); ++k) {
        if (p[k] < 0.0 || q[k] < 0.0) {
            throw std::invalid_argument("relative_entropy: densities must be nonnegative");
        }
        if (p[k] == 0.0) continue;
        if (q[k] <= 0.0) {
            throw std::invalid_argument(
                "relative_entropy: q vanishes where p is positive (support violation)");
        }
        sum += p[k] * std::log(p[k] / q[k]);
    }
    return sum / static_cast<double>(p.size());
}

double fisher_information_1d(std::span<const double> p, std::span<const double> q) {
    const int n = static_cast<int>(p.size());
    if (p.size() != q.size() || n < 3) {
        throw std::invalid_argument("fisher_information_1d: need matching grids with >= 3 bins");
    }
    const double h = 1.0 / n;
    std::vector<double> l(n);
    for (int k = 0; k < n; ++k) {
        if (!(p[k] > 0.0) || !(q[k] > 0.0)) {
            throw std::invalid_argument("fisher_information_1d: densities must be positive");
        }
        l[k] = std::log(p[k] / q[k]);
    }
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double d = (l[(k + 1) % n] - l[(k + n - 1) % n]) / (2.0 * h);
        sum += d * d * p[k];
    }
    return sum / n;
}

double fisher_information_2d(const DensityField2D& p, const DensityField2D& q) {
    const int b1 = p.bins1(), b2 = p.bins2();
    if (q.bins1() != b1 || q.bins2() != b2) {
        throw std::invalid_argument("fisher_information_2d: grid mismatch");
    }
    const double h1 = 1.0 / b1, h2 = 1.0 / b2;
    std::vector<double> l(static_cast<size_t>(b1) * b2);
    for (int i = 0; i < b1; ++i) {
        for (int j = 0; j < b2; ++j) {
            if (!(p.at(i, j) > 0.0) || !(q.at(i, j) > 0.0)) {
                throw std::invalid_argument("fisher_information_2d: densities must be positive");
            }
            l[i * b2 + j] = std::log(p.at(i, j) / q.at(i, j));
        }
    }
    double sum = 0.0;
    for (int i = 0; i < b1; ++i) {
        for (int j = 0; j < b2; ++j) {
            const double d1 = (l[((i + 1) % b1) * b2 + j] - l[((i + b1 - 1) % b1) * b2 + j]) /
                              (2.0 * h1);
            const double d2 = (l[i * b2 + (j + 1) % b2] - l[i * b2 + (j + b2 - 1) % b2]) /
                              (2.0 * h2);
            sum += (d1 * d1 + d2 * d2) * p.at(i, j);
        }
    }
    return sum / (static_cast<double>(b1) * b2);
}

CsiszarKullback csiszar_kullback_check(std::span<const double> p, std::span<const double> q) {
    CsiszarKullback out;
    double l1 = 0.0;
    for (size_t k = 0; k < p.size(); ++k) l1 += std::abs(p[k] - q[k]);
    out.l1 = l1 / static_cast<double>(p.size());
    out.bound = std::sqrt(2.0 * relative_entropy(p, q));
    out.ok = out.l1 <= out.bound + 1e-12;
    return out;
}

LambdaRate lambda_rate(double rho1, double rho2, double kappa1, double kappa2, double beta) {
    if (rho1 <= 0.0 || rho2 <= 0.0) {
        throw std::invalid_argument("lambda_rate: LSI constants must be positive");
    }
    LambdaRate out;
    const double k1 = beta * kappa1;
    const double k2 = beta * kappa2;
    out.condition18 = rho1 * rho2 >= k1 * k2;
    const double disc = (rho1 - rho2) * (rho1 - rho2) + 4.0 * k1 * k2 / (rho1 * rho2);
    out.lambda = (rho1 + rho2 - std::sqrt(disc)) / 4.0;
    return out;
}

double lsi_lower_bound_conditional(const PotentialSpec& spec, double beta, int axis,
                                   int scan_points) {
    if (spec.dimension() != 2) {
        throw std::invalid_argument("lsi_lower_bound_conditional: potential must live on T^2");
    }
    if (axis != 0 && axis != 1) {
        throw std::invalid_argument("lsi_lower_bound_conditional: axis must be 0 or 1");
    }
    if (spec.terms().empty()) return kFourPiSq;
    const int other = 1 - axis;
    PeriodicGrid1D grid(scan_points);
    std::vector<double> x(2);
    double worst = 0.0;
    for (int a = 0; a < scan_points; ++a) {
        x[axis] = grid.center(a);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int c = 0; c < scan_points; ++c) {
            x[other] = grid.center(c);
            const double v = spec.evaluate(x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
    }
    return kFourPiSq * std::exp(-beta * worst);
}

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> value, double t_begin,
                        double t_end) {
    if (t.size() != value.size()) {
        throw std::invalid_argument("fit_decay_rate: series length mismatch");
    }
    std::vector<double> ts, ys;
    for (size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_begin || t[k] > t_end) continue;
        if (!(value[k] > 0.0)) {
            throw std::invalid_argument("fit_decay_rate: nonpositive value inside the fit window");
        }
        ts.push_back(t[k]);
        ys.push_back(std::log(value[k]));
    }
    if (ts.size() < 10) {
        throw std::invalid_argument("fit_decay_rate: need at least 10 points in the window, got " +
                                    std::to_string(ts.size()));
    }
    const double n = static_cast<double>(ts.size());
    double st = 0.0, sy = 0.0;
    for (size_t k = 0; k < ts.size(); ++k) {
        st += ts[k];
        sy += ys[k];
    }
    const double mt = st / n, my = sy / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (size_t k = 0; k < ts.size(); ++k) {
        stt += (ts[k] - mt) * (ts[k] - mt);
        sty += (ts[k] - mt) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    DecayFit fit;
    fit.points = static_cast<int>(ts.size());
    fit.window_begin = t_begin;
    fit.window_end = t_end;
    const double slope = sty / stt;
    fit.rate = -slope;
    fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
    return fit;
}

ConvergenceReport diagnose_potential(const PotentialSpec& spec, double beta, int scan_points) {
    ConvergenceReport report;
    report.r = kFourPiSq;
    const auto kappa = coupling_constants(spec, scan_points >= 512 ? 512 : scan_points);
    report.kappa1 = kappa.kappa1;
    report.kappa2 = kappa.kappa2;
    report.rho1_lb = lsi_lower_bound_conditional(spec, beta, 0, scan_points);
    report.rho2_lb = lsi_lower_bound_conditional(spec, beta, 1, scan_points);
    const auto lr = lambda_rate(report.rho1_lb, report.rho2_lb, report.kappa1, report.kappa2, beta);
    report.lambda_lb = lr.lambda;
    report.condition18 = lr.condition18;
    return report;
}

}  // namespace tabf
