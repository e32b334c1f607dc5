#include "sparsemix/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "sparsemix/special.hpp"

namespace sparsemix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_nonempty(const std::vector<int>& members, const char* who) {
    if (members.empty())
        throw std::invalid_argument(std::string(who) +
                                    ": empty subset; empty components take prior draws");
}
}  // namespace

std::string kernel_type_name(KernelSpec::Type type) {
    switch (type) {
        case KernelSpec::Type::categorical: return "categorical";
        case KernelSpec::Type::poisson: return "poisson";
        case KernelSpec::Type::poisson_glm: return "poisson_glm";
        case KernelSpec::Type::negbin_glm: return "negbin_glm";
    }
    return "unknown";
}

double Kernel::log_subset_evidence(const std::vector<int>&) const {
    throw std::logic_error(name() + ": subset evidence unsupported (non-conjugate kernel)");
}

double Kernel::log_conditional_density(const Theta&, const std::vector<int>&) const {
    throw std::logic_error(name() + ": conditional density unsupported (non-conjugate kernel)");
}

double update_poisson_hyper_b0(const std::vector<double>& mus, double a0, double g0, double G0,
                               RngStream& rng) {
    double sum_mu = 0.0;
    for (double m : mus) {
        if (!(m > 0.0)) throw std::invalid_argument("update_poisson_hyper_b0: mu must be positive");
        sum_mu += m;
    }
    return sample_gamma(g0 + mus.size() * a0, G0 + sum_mu, rng);
}

double sample_rho_prior(double c, RngStream& rng) {
    double u;
    do {
        u = rng.u01();
    } while (u == 0.0);
    const double r = std::sqrt(u);
    return c * r / (1.0 - r);
}

// ---------------------------------------------------------------------------
// Latent class kernel: independent categorical features given the class.

class CategoricalKernel final : public Kernel {
  public:
    CategoricalKernel(const CategoricalData& data, CategoricalHypers hypers)
        : data_(&data), g0_(hypers.g0) {
        if (!(g0_ > 0.0)) throw std::invalid_argument("categorical kernel: g0 must be positive");
    }

    std::string name() const override { return "categorical"; }
    int n_obs() const override { return data_->n_obs(); }

    int param_dim() const override {
        int d = 0;
        for (int card : data_->cardinalities) d += card - 1;
        return d;
    }

    double loglik_point(const Theta& theta, int i) const override {
        const auto& p = std::get<CategoricalParams>(theta);
        const auto& row = data_->codes[i];
        double ll = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            double pr = p.probs[j][row[j]];
            ll += pr > 0.0 ? std::log(pr) : kNegInf;
        }
        return ll;
    }

    Theta sample_conditional(const std::vector<int>& members, const Theta&, bool,
                             RngStream& rng) override {
        require_nonempty(members, "categorical kernel");
        CategoricalParams p;
        p.probs.resize(data_->n_features());
        for (int j = 0; j < data_->n_features(); ++j) {
            std::vector<double> conc(data_->cardinalities[j], g0_);
            for (int i : members) conc[data_->codes[i][j]] += 1.0;
            p.probs[j] = sample_dirichlet(conc, rng);
        }
        return p;
    }

    Theta sample_prior(RngStream& rng) const override {
        CategoricalParams p;
        p.probs.resize(data_->n_features());
        for (int j = 0; j < data_->n_features(); ++j) {
            std::vector<double> conc(data_->cardinalities[j], g0_);
            p.probs[j] = sample_dirichlet(conc, rng);
        }
        return p;
    }

    std::vector<double> functional(const Theta& theta) const override { return flatten(theta); }

    void fill_loglik(const std::vector<Theta>& thetas, int k_count, double* out,
                     int stride) const override {
        // hoist the log(pi) tables out of the observation loop
        const int r = data_->n_features();
        int flat = 0;
        for (int card : data_->cardinalities) flat += card;
        std::vector<double> log_probs(static_cast<std::size_t>(k_count) * flat);
        std::vector<int> offset(r, 0);
        for (int j = 1; j < r; ++j) offset[j] = offset[j - 1] + data_->cardinalities[j - 1];
        for (int k = 0; k < k_count; ++k) {
            const auto& p = std::get<CategoricalParams>(thetas[k]);
            double* row = &log_probs[static_cast<std::size_t>(k) * flat];
            for (int j = 0; j < r; ++j)
                for (int l = 0; l < data_->cardinalities[j]; ++l)
                    row[offset[j] + l] =
                        p.probs[j][l] > 0.0 ? std::log(p.probs[j][l]) : kNegInf;
        }
        for (int i = 0; i < data_->n_obs(); ++i) {
            const auto& codes = data_->codes[i];
            for (int k = 0; k < k_count; ++k) {
                const double* row = &log_probs[static_cast<std::size_t>(k) * flat];
                double ll = 0.0;
                for (int j = 0; j < r; ++j) ll += row[offset[j] + codes[j]];
                out[i * stride + k] = ll;
            }
        }
    }

    int flat_dim() const override {
        int d = 0;
        for (int card : data_->cardinalities) d += card;
        return d;
    }

    std::vector<std::string> flat_names() const override {
        std::vector<std::string> names;
        for (int j = 0; j < data_->n_features(); ++j) {
            std::string feature = j < static_cast<int>(data_->feature_names.size())
                                      ? data_->feature_names[j]
                                      : ("x" + std::to_string(j + 1));
            for (int l = 1; l <= data_->cardinalities[j]; ++l)
                names.push_back("pi_" + feature + "_" + std::to_string(l));
        }
        return names;
    }

    std::vector<double> flatten(const Theta& theta) const override {
        const auto& p = std::get<CategoricalParams>(theta);
        std::vector<double> out;
        out.reserve(flat_dim());
        for (const auto& row : p.probs) out.insert(out.end(), row.begin(), row.end());
        return out;
    }

    Theta unflatten(const std::vector<double>& values) const override {
        if (static_cast<int>(values.size()) != flat_dim())
            throw std::invalid_argument("categorical kernel: bad flat size");
        CategoricalParams p;
        std::size_t pos = 0;
        for (int card : data_->cardinalities) {
            p.probs.emplace_back(values.begin() + pos, values.begin() + pos + card);
            pos += card;
        }
        return p;
    }

    bool conjugate() const override { return true; }

    double log_subset_evidence(const std::vector<int>& members) const override {
        const int m = static_cast<int>(members.size());
        double lev = 0.0;
        for (int j = 0; j < data_->n_features(); ++j) {
            const int card = data_->cardinalities[j];
            std::vector<int> counts(card, 0);
            for (int i : members) ++counts[data_->codes[i][j]];
            lev += log_gamma_stable(card * g0_) - log_gamma_stable(card * g0_ + m);
            for (int c : counts) lev += log_gamma_stable(g0_ + c) - log_gamma_stable(g0_);
        }
        return lev;
    }

    double log_conditional_density(const Theta& theta,
                                   const std::vector<int>& members) const override {
        const auto& p = std::get<CategoricalParams>(theta);
        double lp = 0.0;
        for (int j = 0; j < data_->n_features(); ++j) {
            std::vector<double> conc(data_->cardinalities[j], g0_);
            for (int i : members) conc[data_->codes[i][j]] += 1.0;
            lp += log_dirichlet_pdf(p.probs[j], conc);
        }
        return lp;
    }

    double log_prior_density(const Theta& theta) const override {
        const auto& p = std::get<CategoricalParams>(theta);
        double lp = 0.0;
        for (int j = 0; j < data_->n_features(); ++j) {
            std::vector<double> conc(data_->cardinalities[j], g0_);
            lp += log_dirichlet_pdf(p.probs[j], conc);
        }
        return lp;
    }

  private:
    const CategoricalData* data_;
    double g0_;
};

// ---------------------------------------------------------------------------
// Poisson kernel with hierarchical mean prior mu_k | b0 ~ G(a0, b0),
// b0 ~ G(g0, G0). Freezing b0 at its prior mean makes the kernel fully
// conjugate, which the evidence module requires.

class PoissonKernel final : public Kernel {
  public:
    PoissonKernel(const CountData& data, PoissonHypers hypers) : data_(&data), h_(hypers) {
        if (!(h_.a0 > 0.0) || !(h_.g0 > 0.0))
            throw std::invalid_argument("poisson kernel: a0 and g0 must be positive");
        if (!h_.G0) {
            double mean = 0.0;
            for (int y : data_->y) mean += y;
            mean /= std::max(1, data_->n_obs());
            if (!(mean > 0.0))
                throw std::invalid_argument(
                    "poisson kernel: data mean is zero, G0 must be given explicitly");
            h_.G0 = h_.g0 * mean / h_.a0;
        }
        if (!(*h_.G0 > 0.0)) throw std::invalid_argument("poisson kernel: G0 must be positive");
        hierarchical_ = !h_.fixed_b0.has_value();
        b0_ = h_.fixed_b0.value_or(h_.g0 / *h_.G0);
        if (!(b0_ > 0.0)) throw std::invalid_argument("poisson kernel: b0 must be positive");
    }

    std::string name() const override { return hierarchical_ ? "poisson" : "poisson(fixed-b0)"; }
    int n_obs() const override { return data_->n_obs(); }
    int param_dim() const override { return 1; }

    double loglik_point(const Theta& theta, int i) const override {
        const double mu = std::get<PoissonParams>(theta).mu;
        const int y = data_->y[i];
        if (!(mu > 0.0)) return y == 0 ? 0.0 : kNegInf;
        return y * std::log(mu) - mu - log_factorial(y);
    }

    Theta sample_conditional(const std::vector<int>& members, const Theta&, bool,
                             RngStream& rng) override {
        require_nonempty(members, "poisson kernel");
        double sum_y = 0.0;
        for (int i : members) sum_y += data_->y[i];
        PoissonParams p;
        p.mu = std::max(sample_gamma(h_.a0 + sum_y, b0_ + members.size(), rng), 1e-300);
        return p;
    }

    Theta sample_prior(RngStream& rng) const override {
        PoissonParams p;
        p.mu = std::max(sample_gamma(h_.a0, b0_, rng), 1e-300);
        return p;
    }

    void update_shared_hyper(const std::vector<Theta>& thetas, RngStream& rng) override {
        if (!hierarchical_) return;
        std::vector<double> mus;
        mus.reserve(thetas.size());
        for (const auto& t : thetas) mus.push_back(std::get<PoissonParams>(t).mu);
        b0_ = update_poisson_hyper_b0(mus, h_.a0, h_.g0, *h_.G0, rng);
    }

    bool has_shared_hyper() const override { return hierarchical_; }
    double shared_hyper() const override { return b0_; }
    void set_shared_hyper(double b0) override {
        if (!(b0 > 0.0)) throw std::invalid_argument("poisson kernel: b0 must be positive");
        b0_ = b0;
    }

    void fill_loglik(const std::vector<Theta>& thetas, int k_count, double* out,
                     int stride) const override {
        std::vector<double> log_mu(k_count), mu(k_count);
        for (int k = 0; k < k_count; ++k) {
            mu[k] = std::get<PoissonParams>(thetas[k]).mu;
            log_mu[k] = mu[k] > 0.0 ? std::log(mu[k]) : kNegInf;
        }
        for (int i = 0; i < data_->n_obs(); ++i) {
            const int y = data_->y[i];
            const double lf = log_factorial(y);
            for (int k = 0; k < k_count; ++k)
                out[i * stride + k] = (y == 0 ? 0.0 : y * log_mu[k]) - mu[k] - lf;
        }
    }

    std::vector<double> functional(const Theta& theta) const override {
        return {std::log(std::get<PoissonParams>(theta).mu)};
    }

    int flat_dim() const override { return 1; }
    std::vector<std::string> flat_names() const override { return {"mu"}; }
    std::vector<double> flatten(const Theta& theta) const override {
        return {std::get<PoissonParams>(theta).mu};
    }
    Theta unflatten(const std::vector<double>& values) const override {
        if (values.size() != 1) throw std::invalid_argument("poisson kernel: bad flat size");
        return PoissonParams{values[0]};
    }

    bool conjugate() const override { return !hierarchical_; }

    double log_subset_evidence(const std::vector<int>& members) const override {
        const int m = static_cast<int>(members.size());
        double sum_y = 0.0, lfact = 0.0;
        for (int i : members) {
            sum_y += data_->y[i];
            lfact += log_factorial(data_->y[i]);
        }
        return h_.a0 * std::log(b0_) - log_gamma_stable(h_.a0) + log_gamma_stable(h_.a0 + sum_y) -
               (h_.a0 + sum_y) * std::log(b0_ + m) - lfact;
    }

    double log_conditional_density(const Theta& theta,
                                   const std::vector<int>& members) const override {
        double sum_y = 0.0;
        for (int i : members) sum_y += data_->y[i];
        return log_gamma_pdf(std::get<PoissonParams>(theta).mu, h_.a0 + sum_y,
                             b0_ + members.size());
    }

    double log_prior_density(const Theta& theta) const override {
        return log_gamma_pdf(std::get<PoissonParams>(theta).mu, h_.a0, b0_);
    }

  private:
    const CountData* data_;
    PoissonHypers h_;
    bool hierarchical_ = true;
    double b0_ = 1.0;
};

// ---------------------------------------------------------------------------
// Mixtures of count GLMs. Component updates are single random-walk MH passes
// (coordinate-wise for the coefficients, log scale for the dispersion) with
// proposal scales shared across components and adapted during burn-in only.

class GlmKernelBase : public Kernel {
  public:
    GlmKernelBase(const RegressionData& data, GlmHypers hypers) : data_(&data), h_(hypers) {
        if (data_->n_obs() == 0) throw std::invalid_argument("glm kernel: empty dataset");
        p_ = data_->n_covariates();
        if (p_ == 0) throw std::invalid_argument("glm kernel: no covariates");
        scales_.assign(p_, 0.5);
        accepts_.assign(p_, 0);
        attempts_.assign(p_, 0);
        warn_if_rank_deficient();
    }

    int n_obs() const override { return data_->n_obs(); }

    std::vector<double> functional(const Theta& theta) const override {
        return std::get<GlmParams>(theta).beta;
    }

  protected:
    double linear_predictor(const std::vector<double>& beta, int i) const {
        const auto& x = data_->x[i];
        double s = 0.0;
        for (int j = 0; j < p_; ++j) s += x[j] * beta[j];
        return s;
    }

    double coef_log_prior(double b) const { return log_normal_pdf(b, 0.0, h_.coef_sd); }

    /// One coordinate-wise MH pass over the coefficients against the given
    /// subset log-likelihood functional.
    template <typename LogLik>
    void mh_beta_pass(std::vector<double>& beta, const LogLik& loglik, bool adapt,
                      RngStream& rng) {
        double current_ll = loglik(beta);
        for (int j = 0; j < p_; ++j) {
            const double old = beta[j];
            beta[j] = old + scales_[j] * sample_normal(rng);
            const double prop_ll = loglik(beta);
            const double delta =
                prop_ll - current_ll + coef_log_prior(beta[j]) - coef_log_prior(old);
            ++attempts_[j];
            if (std::log(rng.u01p()) < delta) {
                current_ll = prop_ll;
                ++accepts_[j];
            } else {
                beta[j] = old;
            }
            if (adapt && attempts_[j] >= 50) {
                const double rate = static_cast<double>(accepts_[j]) / attempts_[j];
                if (rate > 0.35)
                    scales_[j] *= 1.25;
                else if (rate < 0.15)
                    scales_[j] /= 1.25;
                accepts_[j] = 0;
                attempts_[j] = 0;
            }
        }
    }

    void warn_if_rank_deficient() const {
        // Gram-matrix Gaussian elimination; a warning is enough, the sampler
        // itself only needs the linear predictor.
        std::vector<std::vector<double>> g(p_, std::vector<double>(p_, 0.0));
        for (int i = 0; i < data_->n_obs(); ++i)
            for (int a = 0; a < p_; ++a)
                for (int b = 0; b < p_; ++b) g[a][b] += data_->x[i][a] * data_->x[i][b];
        double scale = 0.0;
        for (int a = 0; a < p_; ++a) scale = std::max(scale, std::fabs(g[a][a]));
        int rank = 0;
        for (int col = 0, row = 0; col < p_ && row < p_; ++col) {
            int piv = row;
            for (int r = row + 1; r < p_; ++r)
                if (std::fabs(g[r][col]) > std::fabs(g[piv][col])) piv = r;
            if (std::fabs(g[piv][col]) < 1e-10 * std::max(scale, 1.0)) continue;
            std::swap(g[piv], g[row]);
            for (int r = 0; r < p_; ++r) {
                if (r == row) continue;
                double f = g[r][col] / g[row][col];
                for (int c = 0; c < p_; ++c) g[r][c] -= f * g[row][c];
            }
            ++row;
            ++rank;
        }
        if (rank < p_)
            std::cerr << "warning: covariate matrix appears rank deficient (rank " << rank
                      << " of " << p_ << ")\n";
    }

    const RegressionData* data_;
    GlmHypers h_;
    int p_ = 0;
    std::vector<double> scales_;
    std::vector<int> accepts_, attempts_;
};

class PoissonGlmKernel final : public GlmKernelBase {
  public:
    using GlmKernelBase::GlmKernelBase;

    std::string name() const override { return "poisson_glm"; }
    int param_dim() const override { return p_; }

    double loglik_point(const Theta& theta, int i) const override {
        return point_ll(std::get<GlmParams>(theta).beta, i);
    }

    Theta sample_conditional(const std::vector<int>& members, const Theta& current, bool adapt,
                             RngStream& rng) override {
        require_nonempty(members, "poisson_glm kernel");
        GlmParams p = std::get<GlmParams>(current);
        if (static_cast<int>(p.beta.size()) != p_)
            throw std::invalid_argument("poisson_glm kernel: bad coefficient dimension");
        auto ll = [&](const std::vector<double>& beta) {
            double s = 0.0;
            for (int i : members) s += point_ll(beta, i);
            return s;
        };
        mh_beta_pass(p.beta, ll, adapt, rng);
        p.rho = -1.0;
        return p;
    }

    Theta sample_prior(RngStream& rng) const override {
        GlmParams p;
        p.beta.resize(p_);
        for (auto& b : p.beta) b = h_.coef_sd * sample_normal(rng);
        p.rho = -1.0;
        return p;
    }

    int flat_dim() const override { return p_; }
    std::vector<std::string> flat_names() const override {
        std::vector<std::string> names;
        for (int j = 0; j < p_; ++j) {
            std::string cov = j < static_cast<int>(data_->covariate_names.size())
                                  ? data_->covariate_names[j]
                                  : ("x" + std::to_string(j + 1));
            names.push_back("beta_" + cov);
        }
        return names;
    }
    std::vector<double> flatten(const Theta& theta) const override {
        return std::get<GlmParams>(theta).beta;
    }
    Theta unflatten(const std::vector<double>& values) const override {
        if (static_cast<int>(values.size()) != p_)
            throw std::invalid_argument("poisson_glm kernel: bad flat size");
        return GlmParams{values, -1.0};
    }

    double log_prior_density(const Theta& theta) const override {
        const auto& p = std::get<GlmParams>(theta);
        double lp = 0.0;
        for (double b : p.beta) lp += coef_log_prior(b);
        return lp;
    }

  private:
    double point_ll(const std::vector<double>& beta, int i) const {
        const double xb = linear_predictor(beta, i);
        const int y = data_->y[i];
        return y * xb - std::exp(xb) - log_factorial(y);
    }
};

class NegBinGlmKernel final : public GlmKernelBase {
  public:
    NegBinGlmKernel(const RegressionData& data, GlmHypers hypers) : GlmKernelBase(data, hypers) {
        if (!(h_.rho_c > 0.0)) throw std::invalid_argument("negbin kernel: rho_c must be positive");
    }

    std::string name() const override { return "negbin_glm"; }
    int param_dim() const override { return p_ + 1; }

    double loglik_point(const Theta& theta, int i) const override {
        const auto& p = std::get<GlmParams>(theta);
        return point_ll(p.beta, p.rho, i);
    }

    Theta sample_conditional(const std::vector<int>& members, const Theta& current, bool adapt,
                             RngStream& rng) override {
        require_nonempty(members, "negbin_glm kernel");
        GlmParams p = std::get<GlmParams>(current);
        if (static_cast<int>(p.beta.size()) != p_ || !(p.rho > 0.0))
            throw std::invalid_argument("negbin_glm kernel: bad current parameters");
        auto ll_beta = [&](const std::vector<double>& beta) {
            double s = 0.0;
            for (int i : members) s += point_ll(beta, p.rho, i);
            return s;
        };
        mh_beta_pass(p.beta, ll_beta, adapt, rng);

        // MH on log rho; the target density in rho is prop. to
        // rho/(rho+c)^3 * likelihood, plus the log-scale Jacobian.
        auto ll_rho = [&](double rho) {
            double s = 0.0;
            for (int i : members) s += point_ll(p.beta, rho, i);
            return s;
        };
        const double rho_old = p.rho;
        const double rho_prop = rho_old * std::exp(rho_scale_ * sample_normal(rng));
        const double c = h_.rho_c;
        double delta = ll_rho(rho_prop) - ll_rho(rho_old);
        delta += 2.0 * (std::log(rho_prop) - std::log(rho_old));
        delta -= 3.0 * (std::log(rho_prop + c) - std::log(rho_old + c));
        ++rho_attempts_;
        if (std::log(rng.u01p()) < delta) {
            p.rho = rho_prop;
            ++rho_accepts_;
        }
        if (adapt && rho_attempts_ >= 50) {
            const double rate = static_cast<double>(rho_accepts_) / rho_attempts_;
            if (rate > 0.35)
                rho_scale_ *= 1.25;
            else if (rate < 0.15)
                rho_scale_ /= 1.25;
            rho_accepts_ = 0;
            rho_attempts_ = 0;
        }
        return p;
    }

    Theta sample_prior(RngStream& rng) const override {
        GlmParams p;
        p.beta.resize(p_);
        for (auto& b : p.beta) b = h_.coef_sd * sample_normal(rng);
        p.rho = sample_rho_prior(h_.rho_c, rng);
        return p;
    }

    int flat_dim() const override { return p_ + 1; }
    std::vector<std::string> flat_names() const override {
        std::vector<std::string> names;
        for (int j = 0; j < p_; ++j) {
            std::string cov = j < static_cast<int>(data_->covariate_names.size())
                                  ? data_->covariate_names[j]
                                  : ("x" + std::to_string(j + 1));
            names.push_back("beta_" + cov);
        }
        names.push_back("rho");
        return names;
    }
    std::vector<double> flatten(const Theta& theta) const override {
        const auto& p = std::get<GlmParams>(theta);
        std::vector<double> out = p.beta;
        out.push_back(p.rho);
        return out;
    }
    Theta unflatten(const std::vector<double>& values) const override {
        if (static_cast<int>(values.size()) != p_ + 1)
            throw std::invalid_argument("negbin_glm kernel: bad flat size");
        GlmParams p;
        p.beta.assign(values.begin(), values.end() - 1);
        p.rho = values.back();
        return p;
    }

    double log_prior_density(const Theta& theta) const override {
        const auto& p = std::get<GlmParams>(theta);
        double lp = 0.0;
        for (double b : p.beta) lp += coef_log_prior(b);
        const double c = h_.rho_c;
        lp += std::log(2.0 * c) + std::log(p.rho) - 3.0 * std::log(p.rho + c);
        return lp;
    }

  private:
    double point_ll(const std::vector<double>& beta, double rho, int i) const {
        const double xb = linear_predictor(beta, i);
        const double lam = std::exp(xb);
        const int y = data_->y[i];
        const double log_rho_lam = std::log(rho + lam);
        double ll = std::lgamma(y + rho) - log_gamma_stable(rho) - log_factorial(y);
        ll += rho * (std::log(rho) - log_rho_lam);
        ll += y == 0 ? 0.0 : y * (xb - log_rho_lam);
        return ll;
    }

    double rho_scale_ = 0.5;
    int rho_accepts_ = 0, rho_attempts_ = 0;
};

std::unique_ptr<Kernel> make_kernel(const KernelSpec& spec, const Dataset& data) {
    switch (spec.type) {
        case KernelSpec::Type::categorical:
            return std::make_unique<CategoricalKernel>(data.categorical(), spec.categorical);
        case KernelSpec::Type::poisson:
            return std::make_unique<PoissonKernel>(data.counts(), spec.poisson);
        case KernelSpec::Type::poisson_glm:
            return std::make_unique<PoissonGlmKernel>(data.regression(), spec.glm);
        case KernelSpec::Type::negbin_glm:
            return std::make_unique<NegBinGlmKernel>(data.regression(), spec.glm);
    }
    throw std::invalid_argument("make_kernel: unknown kernel type");
}

}  // namespace sparsemix
