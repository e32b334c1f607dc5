#include "sparsemix/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsemix/special.hpp"

namespace sparsemix {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::uint64_t s = seed;
    std::uint64_t mix = splitmix64(s);
    s ^= stream_id * 0x9e3779b97f4a7c15ULL + mix;
    for (auto& w : state_) w = splitmix64(s);
    // xoshiro must not start from the all-zero state
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::u01p() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double sample_uniform(double lo, double hi, RngStream& rng) {
    if (!(lo < hi)) throw std::invalid_argument("sample_uniform: lo must be < hi");
    return lo + (hi - lo) * rng.u01();
}

double sample_normal(RngStream& rng) {
    // Box-Muller; two uniforms per draw keeps the stream stateless.
    double u1 = rng.u01p();
    double u2 = rng.u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double sample_gamma(double shape, double rate, RngStream& rng) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("sample_gamma: shape and rate must be positive");
    if (shape < 1.0) {
        double u = rng.u01p();
        return sample_gamma(shape + 1.0, rate, rng) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        double x, v;
        do {
            x = sample_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.u01p();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v / rate;
    }
}

double sample_log_gamma(double shape, double rate, RngStream& rng) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("sample_log_gamma: shape and rate must be positive");
    if (shape >= 1.0) return std::log(sample_gamma(shape, 1.0, rng)) - std::log(rate);
    double u = rng.u01p();
    return std::log(sample_gamma(shape + 1.0, 1.0, rng)) + std::log(u) / shape - std::log(rate);
}

double sample_beta(double a, double b, RngStream& rng) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("sample_beta: parameters must be positive");
    double lx, l1mx;
    sample_log_beta(a, b, rng, lx, l1mx);
    return std::exp(lx);
}

void sample_log_beta(double a, double b, RngStream& rng, double& log_x, double& log_1mx) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("sample_log_beta: parameters must be positive");
    double lg1 = sample_log_gamma(a, 1.0, rng);
    double lg2 = sample_log_gamma(b, 1.0, rng);
    double lse = log_add_exp(lg1, lg2);
    log_x = lg1 - lse;
    log_1mx = lg2 - lse;
}

std::vector<double> sample_dirichlet(const std::vector<double>& concentration, RngStream& rng) {
    if (concentration.empty())
        throw std::invalid_argument("sample_dirichlet: empty concentration vector");
    const std::size_t n = concentration.size();
    std::vector<double> lg(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(concentration[i] > 0.0))
            throw std::invalid_argument("sample_dirichlet: concentrations must be positive");
        lg[i] = sample_log_gamma(concentration[i], 1.0, rng);
    }
    const double lse = log_sum_exp(lg);
    std::vector<double> out(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(lg[i] - lse);
        total += out[i];
    }
    for (auto& x : out) x /= total;  // renormalization guard
    return out;
}

int sample_categorical(const std::vector<double>& weights, RngStream& rng) {
    if (weights.empty()) throw std::invalid_argument("sample_categorical: empty weights");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument("sample_categorical: weights must be finite and nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("sample_categorical: all weights are zero");
    double target = rng.u01() * total;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
        acc += weights[k];
        if (target < acc) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size()) - 1;
}

int sample_categorical_log(const std::vector<double>& log_weights, RngStream& rng) {
    if (log_weights.empty()) throw std::invalid_argument("sample_categorical_log: empty weights");
    double m = -std::numeric_limits<double>::infinity();
    for (double lw : log_weights) m = std::max(m, lw);
    if (!std::isfinite(m))
        throw std::invalid_argument("sample_categorical_log: no finite weight");
    std::vector<double> w(log_weights.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(log_weights[k] - m);
    return sample_categorical(w, rng);
}

int sample_poisson(double mean, RngStream& rng) {
    if (mean < 0.0 || !std::isfinite(mean))
        throw std::invalid_argument("sample_poisson: mean must be finite and nonnegative");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        // Knuth product method
        const double limit = std::exp(-mean);
        int k = 0;
        double prod = rng.u01p();
        while (prod > limit) {
            prod *= rng.u01p();
            ++k;
        }
        return k;
    }
    // Hoermann's PTRS transformed-rejection sampler
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double u = rng.u01() - 0.5;
        double v = rng.u01p();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<int>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * log_mean - mean - std::lgamma(kf + 1.0))
            return static_cast<int>(kf);
    }
}

std::vector<int> sample_multinomial(int n, const std::vector<double>& probs, RngStream& rng) {
    if (n < 0) throw std::invalid_argument("sample_multinomial: negative count");
    if (probs.empty()) throw std::invalid_argument("sample_multinomial: empty probabilities");
    std::vector<double> cum(probs.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (probs[k] < 0.0)
            throw std::invalid_argument("sample_multinomial: negative probability");
        acc += probs[k];
        cum[k] = acc;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("sample_multinomial: zero total mass");
    std::vector<int> counts(probs.size(), 0);
    for (int i = 0; i < n; ++i) {
        double target = rng.u01() * acc;
        auto it = std::upper_bound(cum.begin(), cum.end(), target);
        std::size_t k = std::min<std::size_t>(it - cum.begin(), probs.size() - 1);
        ++counts[k];
    }
    return counts;
}

}  // namespace sparsemix
