#pragma once

// Shared test machinery: independent oracles (grid quadrature for 1-d
// densities, set-partition enumeration), KS distance against a gridded CDF,
// and batch-mean standard errors for autocorrelated chains. Everything here
// must stay independent of the implementation paths it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace testsupport {

/// Cumulative distribution on a grid obtained by trapezoid integration of an
/// unnormalized log density over [lo, hi].
struct GridCdf {
    std::vector<double> x;
    std::vector<double> cdf;

    double operator()(double v) const {
        if (v <= x.front()) return 0.0;
        if (v >= x.back()) return 1.0;
        auto it = std::upper_bound(x.begin(), x.end(), v);
        std::size_t hi = it - x.begin();
        std::size_t lo = hi - 1;
        double t = (v - x[lo]) / (x[hi] - x[lo]);
        return cdf[lo] + t * (cdf[hi] - cdf[lo]);
    }
};

inline GridCdf quadrature_cdf(const std::function<double(double)>& log_density, double lo,
                              double hi, int n_grid = 20001) {
    GridCdf g;
    g.x.resize(n_grid);
    std::vector<double> ld(n_grid);
    double max_ld = -1e300;
    for (int i = 0; i < n_grid; ++i) {
        g.x[i] = lo + (hi - lo) * i / (n_grid - 1);
        ld[i] = log_density(g.x[i]);
        max_ld = std::max(max_ld, ld[i]);
    }
    std::vector<double> dens(n_grid);
    for (int i = 0; i < n_grid; ++i) dens[i] = std::exp(ld[i] - max_ld);
    g.cdf.assign(n_grid, 0.0);
    for (int i = 1; i < n_grid; ++i)
        g.cdf[i] = g.cdf[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * (g.x[i] - g.x[i - 1]);
    const double total = g.cdf.back();
    for (auto& c : g.cdf) c /= total;
    return g;
}

/// Gridded CDF of a positive variable via the substitution t = log x, which
/// removes integrable singularities at zero (gamma shapes below one).
/// The returned CDF is over t; compare against log draws.
inline GridCdf quadrature_cdf_log(const std::function<double(double)>& log_density_x,
                                  double x_lo, double x_hi, int n_grid = 20001) {
    return quadrature_cdf(
        [&](double t) { return log_density_x(std::exp(t)) + t; }, std::log(x_lo),
        std::log(x_hi), n_grid);
}

/// Kolmogorov-Smirnov distance between draws and a reference CDF.
inline double ks_distance(std::vector<double> draws, const GridCdf& ref) {
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        double f = ref(draws[i]);
        d = std::max(d, std::fabs(f - (i + 1) / n));
        d = std::max(d, std::fabs(f - i / n));
    }
    return d;
}

inline double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

inline double variance_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
}

/// Standard error of the mean of an autocorrelated sequence via batch means.
inline double batch_mean_se(const std::vector<double>& chain, int n_batches = 50) {
    const int n = static_cast<int>(chain.size());
    n_batches = std::min(n_batches, n);
    std::vector<double> batch(n_batches, 0.0);
    std::vector<int> count(n_batches, 0);
    for (int i = 0; i < n; ++i) {
        int b = static_cast<int>(static_cast<long long>(i) * n_batches / n);
        batch[b] += chain[i];
        ++count[b];
    }
    for (int b = 0; b < n_batches; ++b) batch[b] /= count[b];
    return std::sqrt(variance_of(batch) / n_batches);
}

/// All set partitions of {0..n-1} as canonical label vectors (block index by
/// first appearance); optionally capped at max_blocks.
inline std::vector<std::vector<int>> set_partitions(int n, int max_blocks) {
    std::vector<std::vector<int>> out;
    std::vector<int> labels(n, 0);
    std::function<void(int, int)> rec = [&](int i, int used) {
        if (i == n) {
            out.push_back(labels);
            return;
        }
        for (int b = 0; b <= used && b < max_blocks; ++b) {
            labels[i] = b;
            rec(i + 1, std::max(used, b + 1));
        }
    };
    rec(0, 0);
    return out;
}

}  // namespace testsupport
