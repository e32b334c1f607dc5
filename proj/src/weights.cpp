#include "sparsemix/weights.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsemix/special.hpp"

namespace sparsemix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double WeightState::log_residual() const {
    double r = 0.0;
    for (double l : log_1m_sticks) r += l;
    return r;
}

std::vector<double> WeightState::sticks() const {
    std::vector<double> out(log_sticks.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::exp(log_sticks[k]);
    return out;
}

void WeightState::refresh_weights() {
    const std::size_t n = log_sticks.size();
    log_weights.resize(n);
    weights.resize(n);
    double acc = 0.0;  // sum of log(1 - nu_j) for j < k
    for (std::size_t k = 0; k < n; ++k) {
        log_weights[k] = log_sticks[k] + acc;
        weights[k] = std::exp(log_weights[k]);
        acc += log_1m_sticks[k];
    }
}

void WeightState::push_stick(double log_nu, double log_1m_nu) {
    log_sticks.push_back(log_nu);
    log_1m_sticks.push_back(log_1m_nu);
    double prefix = 0.0;
    for (std::size_t j = 0; j + 1 < log_1m_sticks.size(); ++j) prefix += log_1m_sticks[j];
    log_weights.push_back(log_nu + prefix);
    weights.push_back(std::exp(log_weights.back()));
}

std::vector<double> sticks_to_weights(const std::vector<double>& sticks) {
    if (sticks.empty()) throw std::domain_error("sticks_to_weights: empty stick vector");
    std::vector<double> out(sticks.size());
    double remaining = 1.0;
    for (std::size_t k = 0; k < sticks.size(); ++k) {
        double nu = sticks[k];
        if (!(nu > 0.0) || nu > 1.0)
            throw std::domain_error("sticks_to_weights: stick outside (0,1]");
        out[k] = nu * remaining;
        remaining *= (1.0 - nu);
    }
    return out;
}

std::vector<double> weights_to_sticks(const std::vector<double>& weights) {
    if (weights.empty()) throw std::domain_error("weights_to_sticks: empty weight vector");
    std::vector<double> out(weights.size());
    double remaining = 1.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] < 0.0) throw std::domain_error("weights_to_sticks: negative weight");
        if (!(remaining > 0.0))
            throw std::domain_error("weights_to_sticks: weights already exhausted");
        out[k] = std::min(weights[k] / remaining, 1.0);
        remaining -= weights[k];
    }
    return out;
}

WeightState sample_sticks_posterior(const AllocationState& alloc, Family family,
                                    double precision, int truncation, RngStream& rng) {
    if (truncation < 1)
        throw std::invalid_argument("sample_sticks_posterior: truncation must be >= 1");
    if (!(precision > 0.0))
        throw std::invalid_argument("sample_sticks_posterior: precision must be positive");

    auto count_at = [&](int k) {
        return k < static_cast<int>(alloc.counts.size()) ? alloc.counts[k] : 0;
    };
    // tail[k] = sum of counts strictly beyond component k
    std::vector<double> tail(truncation, 0.0);
    double acc = 0.0;
    for (int k = truncation - 1; k >= 0; --k) {
        tail[k] = acc;
        acc += count_at(k);
    }

    WeightState w;
    w.family = family;
    w.log_sticks.resize(truncation);
    w.log_1m_sticks.resize(truncation);
    for (int k = 0; k < truncation; ++k) {
        double a, b;
        if (family == Family::sfm) {
            if (k == truncation - 1) {
                w.log_sticks[k] = 0.0;  // nu_K = 1 closes the weights
                w.log_1m_sticks[k] = kNegInf;
                continue;
            }
            a = precision + count_at(k);
            b = precision * (truncation - 1 - k) + tail[k];
        } else {
            a = 1.0 + count_at(k);
            b = precision + tail[k];
        }
        sample_log_beta(a, b, rng, w.log_sticks[k], w.log_1m_sticks[k]);
    }
    w.refresh_weights();
    return w;
}

double slice_threshold(Family family, double kappa, int k) {
    if (family == Family::sfm) return 1.0;
    if (!(kappa > 0.0) || !(kappa < 1.0))
        throw std::domain_error("slice_threshold: kappa must lie in (0,1)");
    return (1.0 - kappa) * std::pow(kappa, k - 1);
}

std::vector<double> slice_thresholds(Family family, double kappa, int count) {
    if (count < 1) throw std::invalid_argument("slice_thresholds: count must be >= 1");
    std::vector<double> xi(count);
    for (int k = 1; k <= count; ++k) xi[k - 1] = slice_threshold(family, kappa, k);
    return xi;
}

int truncation_hard_cap(double alpha, int n_obs) {
    double ln = std::log(static_cast<double>(std::max(n_obs, 2)));
    return 10 * static_cast<int>(std::ceil(alpha * ln)) + 50;
}

int required_truncation(WeightState& w, double slice_minimum, double alpha, int min_levels,
                        int hard_cap, RngStream& rng) {
    if (!(slice_minimum > 0.0) || !(slice_minimum < 1.0))
        throw std::invalid_argument("required_truncation: slice_minimum must lie in (0,1)");
    const double log_min = std::log(slice_minimum);
    while (w.truncation() < min_levels || w.log_residual() >= log_min) {
        if (w.truncation() >= hard_cap)
            throw std::runtime_error(
                "required_truncation: truncation cap exceeded; slice variables are "
                "pathologically small");
        double lnu, l1m;
        sample_log_beta(1.0, alpha, rng, lnu, l1m);
        w.push_stick(lnu, l1m);
    }
    // smallest prefix whose residual is already below the slice minimum
    double acc = 0.0;
    for (int k = 0; k < w.truncation(); ++k) {
        acc += w.log_1m_sticks[k];
        if (acc < log_min && k + 1 >= min_levels) return k + 1;
    }
    return w.truncation();
}

}  // namespace sparsemix
