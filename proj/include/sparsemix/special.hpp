#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace sparsemix {

/// ln Gamma(x) for x > 0.
///
/// For x < 0.5 the identity Gamma(x) = Gamma(1+x)/x is used, so the result
/// stays finite and accurate for arguments as small as 1e-300. This matters
/// for the partition-prior evaluations where the precision parameter can be
/// driven toward zero by a shrinkage prior.
inline double log_gamma_stable(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::domain_error("log_gamma_stable: argument must be positive and finite");
    if (x < 0.5)
        return std::lgamma(1.0 + x) - std::log(x);
    return std::lgamma(x);
}

/// log(exp(a) + exp(b)) without overflow. -inf arguments are handled.
inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

inline double log_sum_exp(std::span<const double> v) {
    if (v.empty()) return -std::numeric_limits<double>::infinity();
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& v) {
    return log_sum_exp(std::span<const double>(v));
}

/// ln n!
inline double log_factorial(long long n) {
    if (n < 0) throw std::domain_error("log_factorial: negative argument");
    return std::lgamma(static_cast<double>(n) + 1.0);
}

/// ln B(a,b)
inline double log_beta_fn(double a, double b) {
    return log_gamma_stable(a) + log_gamma_stable(b) - log_gamma_stable(a + b);
}

inline double log_normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - 0.91893853320467274178032973640562;  // ln sqrt(2 pi)
}

inline double log_gamma_pdf(double x, double shape, double rate) {
    if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return shape * std::log(rate) - log_gamma_stable(shape) + (shape - 1.0) * std::log(x) -
           rate * x;
}

inline double log_dirichlet_pdf(std::span<const double> x, std::span<const double> conc) {
    if (x.size() != conc.size() || x.empty())
        throw std::invalid_argument("log_dirichlet_pdf: dimension mismatch");
    double total_conc = 0.0, lp = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0.0) return -std::numeric_limits<double>::infinity();
        lp += (conc[i] - 1.0) * std::log(std::max(x[i], 1e-300));
        lp -= log_gamma_stable(conc[i]);
        total_conc += conc[i];
    }
    return lp + log_gamma_stable(total_conc);
}

}  // namespace sparsemix
