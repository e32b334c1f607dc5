#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sparsemix/data.hpp"
#include "sparsemix/random.hpp"

namespace sparsemix {

// Component-specific parameters per kernel type.
struct CategoricalParams {
    std::vector<std::vector<double>> probs;  // per feature, a simplex of length D_j
};
struct PoissonParams {
    double mu = 1.0;
};
struct GlmParams {
    std::vector<double> beta;
    double rho = -1.0;  // negative binomial dispersion; < 0 means not present
};

using Theta = std::variant<CategoricalParams, PoissonParams, GlmParams>;

struct CategoricalHypers {
    double g0 = 1.0;  // symmetric Dirichlet weight per category, each feature
};

struct PoissonHypers {
    double a0 = 0.1;
    double g0 = 0.5;
    std::optional<double> G0;        // default: g0 * mean(y) / a0
    std::optional<double> fixed_b0;  // set to freeze b0 (fully conjugate variant)
};

struct GlmHypers {
    double coef_sd = 2.0;                          // N(0, coef_sd^2) coefficient prior
    double rho_c = 10.0 / (1.0 + std::sqrt(2.0));  // dispersion prior scale, median 10
};

struct KernelSpec {
    enum class Type { categorical, poisson, poisson_glm, negbin_glm };
    Type type = Type::categorical;
    CategoricalHypers categorical;
    PoissonHypers poisson;
    GlmHypers glm;
};

std::string kernel_type_name(KernelSpec::Type type);

/// Component-distribution plug-in: likelihood evaluation, complete-data
/// posterior sampling for occupied components, prior sampling for empty ones.
/// A kernel object holds a reference to the dataset plus any shared hyper
/// state (Poisson b0) and proposal-adaptation state (GLM kernels), so one
/// instance belongs to one chain.
class Kernel {
  public:
    virtual ~Kernel() = default;

    virtual std::string name() const = 0;
    virtual int n_obs() const = 0;

    /// Number of free parameters per component; this is the dimension that
    /// enters the d/2 overfitting threshold.
    virtual int param_dim() const = 0;

    virtual double loglik_point(const Theta& theta, int i) const = 0;

    double loglik_subset(const Theta& theta, const std::vector<int>& members) const {
        double s = 0.0;
        for (int i : members) s += loglik_point(theta, i);
        return s;
    }

    /// Fill the n_obs x K log-likelihood table used by the allocation step,
    /// row-major with stride `stride`. The default loops loglik_point;
    /// kernels override it to hoist per-component work (log parameter
    /// tables) out of the observation loop, which dominates sweep cost.
    virtual void fill_loglik(const std::vector<Theta>& thetas, int k_count, double* out,
                             int stride) const {
        for (int i = 0; i < n_obs(); ++i)
            for (int k = 0; k < k_count; ++k) out[i * stride + k] = loglik_point(thetas[k], i);
    }

    /// Complete-data posterior draw given the member observations. Conjugate
    /// kernels return an exact draw; GLM kernels perform one random-walk MH
    /// pass starting from `current` (scales adapt while `adapt` is set).
    virtual Theta sample_conditional(const std::vector<int>& members, const Theta& current,
                                     bool adapt, RngStream& rng) = 0;

    virtual Theta sample_prior(RngStream& rng) const = 0;

    /// Shared-hyper barrier after all component updates (Poisson b0).
    virtual void update_shared_hyper(const std::vector<Theta>& thetas, RngStream& rng) {
        (void)thetas;
        (void)rng;
    }
    virtual bool has_shared_hyper() const { return false; }
    virtual double shared_hyper() const { return std::nan(""); }
    virtual void set_shared_hyper(double) {}

    /// Point-process projection used for identification.
    virtual std::vector<double> functional(const Theta& theta) const = 0;

    // Flat serialization of a component draw (trace sidecar columns).
    virtual int flat_dim() const = 0;
    virtual std::vector<std::string> flat_names() const = 0;
    virtual std::vector<double> flatten(const Theta& theta) const = 0;
    virtual Theta unflatten(const std::vector<double>& values) const = 0;

    virtual double log_prior_density(const Theta& theta) const = 0;

    // Conjugate-evidence hooks; only categorical and fixed-b0 Poisson kernels
    // support them.
    virtual bool conjugate() const { return false; }
    /// log integral of the member likelihood against the prior.
    virtual double log_subset_evidence(const std::vector<int>& members) const;
    /// Density of the complete-data posterior given `members`, at `theta`.
    virtual double log_conditional_density(const Theta& theta,
                                           const std::vector<int>& members) const;
};

std::unique_ptr<Kernel> make_kernel(const KernelSpec& spec, const Dataset& data);

/// Full conditional of the Poisson hyper b0 given component means:
/// b0 ~ Gamma(g0 + K a0, G0 + sum_k mu_k) with K = mus.size().
double update_poisson_hyper_b0(const std::vector<double>& mus, double a0, double g0, double G0,
                               RngStream& rng);

/// Inverse-CDF draw from the dispersion prior p(rho) = 2 c rho / (rho+c)^3,
/// whose CDF is (rho/(rho+c))^2.
double sample_rho_prior(double c, RngStream& rng);

}  // namespace sparsemix
