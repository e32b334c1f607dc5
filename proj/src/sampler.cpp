#include "sparsemix/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sparsemix/special.hpp"

namespace sparsemix {

GammaPrior match_prior(MatchDirection direction, GammaPrior source, int K) {
    if (!(source.a > 0.0) || !(source.b > 0.0))
        throw std::invalid_argument("match_prior: Gamma parameters must be positive");
    if (K < 1) throw std::invalid_argument("match_prior: K must be >= 1");
    if (direction == MatchDirection::sfm_to_dpm) return {source.a, source.b / K};
    return {source.a, source.b * K};
}

std::vector<int> ChainTrace::kplus_column() const {
    std::vector<int> out;
    out.reserve(sweeps.size());
    for (const auto& s : sweeps) out.push_back(s.kplus);
    return out;
}

std::vector<double> ChainTrace::precision_column() const {
    std::vector<double> out;
    out.reserve(sweeps.size());
    for (const auto& s : sweeps) out.push_back(s.precision);
    return out;
}

double precision_prior_upper(const PrecisionPrior& prior, const Kernel& kernel) {
    if (prior.upper > 0.0) return prior.upper;
    return 0.5 * kernel.param_dim();
}

double precision_prior_mean(const PrecisionPrior& prior, const Kernel& kernel) {
    switch (prior.type) {
        case PrecisionPrior::Type::gamma: return prior.gamma.mean();
        case PrecisionPrior::Type::uniform: return 0.5 * precision_prior_upper(prior, kernel);
        case PrecisionPrior::Type::fixed: return prior.value;
    }
    throw std::logic_error("precision_prior_mean: unknown prior type");
}

namespace {

// Quantile bins over a sortable column: observations are ordered by value and
// cut into init_k nearly equal chunks.
template <typename T>
std::vector<int> quantile_bins(const std::vector<T>& values, int init_k) {
    const int n = static_cast<int>(values.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    std::vector<int> labels(n, 0);
    for (int pos = 0; pos < n; ++pos) {
        long long bin = static_cast<long long>(pos) * init_k / n;
        labels[order[pos]] = static_cast<int>(bin);
    }
    return labels;
}

// k-modes pass for categorical rows: Hamming assignment to mode vectors.
std::vector<int> kmodes(const CategoricalData& data, int init_k, RngStream& rng) {
    const int n = data.n_obs();
    const int r = data.n_features();
    std::vector<int> center_rows(init_k);
    for (int c = 0; c < init_k; ++c)
        center_rows[c] = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    std::vector<std::vector<int>> centers(init_k);
    for (int c = 0; c < init_k; ++c) centers[c] = data.codes[center_rows[c]];

    std::vector<int> labels(n, 0);
    for (int iter = 0; iter < 20; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0, best_dist = r + 1;
            for (int c = 0; c < init_k; ++c) {
                int dist = 0;
                for (int j = 0; j < r; ++j) dist += (data.codes[i][j] != centers[c][j]);
                if (dist < best_dist) {
                    best_dist = dist;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        for (int c = 0; c < init_k; ++c) {
            for (int j = 0; j < r; ++j) {
                std::vector<int> freq(data.cardinalities[j], 0);
                for (int i = 0; i < n; ++i)
                    if (labels[i] == c) ++freq[data.codes[i][j]];
                int mode = 0;
                for (int l = 1; l < data.cardinalities[j]; ++l)
                    if (freq[l] > freq[mode]) mode = l;
                centers[c][j] = mode;
            }
        }
        if (!changed) break;
    }

    // All init_k groups must start occupied; empty cells (duplicate rows can
    // collapse centers) steal the worst-fitting point of a multi-member cell.
    std::vector<int> counts(init_k, 0);
    for (int lab : labels) ++counts[lab];
    for (int c = 0; c < init_k; ++c) {
        if (counts[c] > 0) continue;
        int steal = -1, worst = -1;
        for (int i = 0; i < n; ++i) {
            if (counts[labels[i]] < 2) continue;
            int dist = 0;
            for (int j = 0; j < r; ++j) dist += (data.codes[i][j] != centers[labels[i]][j]);
            if (dist > worst) {
                worst = dist;
                steal = i;
            }
        }
        --counts[labels[steal]];
        labels[steal] = c;
        ++counts[c];
        centers[c] = data.codes[steal];
    }
    return labels;
}

double log_precision_hyperprior(double v, const ModelSpec& spec, const Kernel& kernel) {
    switch (spec.precision_prior.type) {
        case PrecisionPrior::Type::gamma: {
            const auto& g = spec.precision_prior.gamma;
            return (g.a - 1.0) * std::log(v) - g.b * v;
        }
        case PrecisionPrior::Type::uniform: {
            const double upper = precision_prior_upper(spec.precision_prior, kernel);
            return v < upper ? 0.0 : -std::numeric_limits<double>::infinity();
        }
        case PrecisionPrior::Type::fixed: return 0.0;
    }
    return 0.0;
}

double log_partition_prior(const AllocationState& alloc, const ModelSpec& spec, double v) {
    return spec.family == Family::sfm ? log_prior_partition_sfm(alloc, v, spec.K)
                                      : log_prior_partition_dpm(alloc, v);
}

// Step (a): component parameters, empty components from the prior; shared
// hyper barrier afterwards. In likelihood-off mode every component is a
// prior draw, because the complete-data posterior of a flat likelihood is
// the prior itself.
void update_thetas(ChainState& state, const ModelSpec& spec, Kernel& kernel, RngStream& rng,
                   bool adapt) {
    const int trunc = state.truncation();
    std::vector<std::vector<int>> members(trunc);
    for (int i = 0; i < state.alloc.n_obs; ++i) members[state.alloc.labels[i]].push_back(i);
    for (int k = 0; k < trunc; ++k) {
        if (members[k].empty() || spec.likelihood_off)
            state.thetas[k] = kernel.sample_prior(rng);
        else
            state.thetas[k] = kernel.sample_conditional(members[k], state.thetas[k], adapt, rng);
    }
    kernel.update_shared_hyper(state.thetas, rng);
}

void allocate_sfm(ChainState& state, const ModelSpec& spec, const Kernel& kernel,
                  RngStream& rng) {
    const int K = state.truncation();
    const int n = state.alloc.n_obs;
    std::vector<double> loglik(static_cast<std::size_t>(n) * K, 0.0);
    if (!spec.likelihood_off) kernel.fill_loglik(state.thetas, K, loglik.data(), K);
    std::vector<double> logw(K);
    for (int i = 0; i < n; ++i) {
        const double* row = &loglik[static_cast<std::size_t>(i) * K];
        for (int k = 0; k < K; ++k) logw[k] = state.weights.log_weights[k] + row[k];
        state.alloc.move(i, sample_categorical_log(logw, rng));
    }
}

void allocate_dpm(ChainState& state, const ModelSpec& spec, Kernel& kernel, RngStream& rng) {
    const int n = state.alloc.n_obs;
    const double kappa = spec.kappa;

    // (c-1) slice variables below the threshold of the current component
    std::vector<double> u(n);
    double u_min = 1.0;
    for (int i = 0; i < n; ++i) {
        u[i] = rng.u01p() * slice_threshold(Family::dpm, kappa, state.alloc.labels[i] + 1);
        u_min = std::min(u_min, u[i]);
    }

    // Random truncation: enough sticks that the residual weight drops below
    // the smallest slice variable, and at least as many levels as any
    // threshold still above it can address (the indicator can point there).
    const int cap = truncation_hard_cap(state.precision.value, n);
    int support = 1;
    while (support < cap && slice_threshold(Family::dpm, kappa, support + 1) > u_min) ++support;
    const int min_levels = std::max(support, state.alloc.max_occupied());
    const int k_star = required_truncation(state.weights, u_min, state.precision.value,
                                           min_levels, cap, rng);
    while (state.truncation() < state.weights.truncation())
        state.thetas.push_back(kernel.sample_prior(rng));

    // (c-2) categorical draw over the components whose threshold exceeds u_i
    std::vector<double> loglik(static_cast<std::size_t>(n) * k_star, 0.0);
    if (!spec.likelihood_off) kernel.fill_loglik(state.thetas, k_star, loglik.data(), k_star);
    std::vector<double> logw(k_star);
    std::vector<double> log_xi(k_star), xi(k_star);
    for (int k = 0; k < k_star; ++k) {
        xi[k] = slice_threshold(Family::dpm, kappa, k + 1);
        log_xi[k] = std::log(xi[k]);
    }
    std::vector<int> new_labels(n);
    for (int i = 0; i < n; ++i) {
        const double* row = &loglik[static_cast<std::size_t>(i) * k_star];
        for (int k = 0; k < k_star; ++k) {
            logw[k] = u[i] < xi[k]
                          ? state.weights.log_weights[k] + row[k] - log_xi[k]
                          : -std::numeric_limits<double>::infinity();
        }
        new_labels[i] = sample_categorical_log(logw, rng);
    }
    state.alloc = AllocationState::from_labels(std::move(new_labels), k_star);

    // Trim trailing empty components; occupied interior gaps stay.
    const int k_off = std::max(1, state.alloc.max_occupied());
    state.alloc.counts.resize(k_off);
    state.thetas.resize(k_off);
    state.weights.log_sticks.resize(k_off);
    state.weights.log_1m_sticks.resize(k_off);
    state.weights.refresh_weights();
}

}  // namespace

std::vector<int> initial_classification(const Dataset& data, int init_k, RngStream& rng) {
    if (init_k < 1) throw std::domain_error("initialize: init_k must be >= 1");
    if (init_k > data.n_obs())
        throw std::domain_error("initialize: init_k exceeds the number of observations");
    if (init_k == 1) return std::vector<int>(data.n_obs(), 0);
    if (const auto* cat = std::get_if<CategoricalData>(&data.value))
        return kmodes(*cat, init_k, rng);
    if (const auto* cnt = std::get_if<CountData>(&data.value))
        return quantile_bins(cnt->y, init_k);
    return quantile_bins(data.regression().y, init_k);
}

ChainState initialize(const ModelSpec& spec, const Dataset& data, Kernel& kernel, int init_k,
                      RngStream& rng) {
    if (spec.family == Family::sfm) {
        if (spec.K < 1) throw std::invalid_argument("initialize: SFM needs K >= 1");
        if (init_k > spec.K) throw std::invalid_argument("initialize: init_k exceeds K");
    }
    ChainState state;
    auto labels = initial_classification(data, init_k, rng);
    const int trunc = spec.family == Family::sfm
                          ? spec.K
                          : std::max(*std::max_element(labels.begin(), labels.end()) + 1, 1) + 5;
    state.alloc = AllocationState::from_labels(std::move(labels), trunc);
    state.precision.value = precision_prior_mean(spec.precision_prior, kernel);

    state.thetas.resize(trunc, kernel.sample_prior(rng));
    std::vector<std::vector<int>> members(trunc);
    for (int i = 0; i < state.alloc.n_obs; ++i) members[state.alloc.labels[i]].push_back(i);
    for (int k = 0; k < trunc; ++k) {
        state.thetas[k] = kernel.sample_prior(rng);
        if (!members[k].empty() && !spec.likelihood_off)
            state.thetas[k] = kernel.sample_conditional(members[k], state.thetas[k], false, rng);
    }
    kernel.update_shared_hyper(state.thetas, rng);
    state.weights =
        sample_sticks_posterior(state.alloc, spec.family, state.precision.value, trunc, rng);
    return state;
}

void mh_precision(ChainState& state, const ModelSpec& spec, const Kernel& kernel, RngStream& rng,
                  bool adapt) {
    if (spec.precision_prior.type == PrecisionPrior::Type::fixed) return;
    auto& ps = state.precision;
    const double v_old = ps.value;
    const double v_prop = v_old * std::exp(ps.proposal_scale * sample_normal(rng));
    double delta = log_precision_hyperprior(v_prop, spec, kernel) -
                   log_precision_hyperprior(v_old, spec, kernel);
    if (std::isfinite(delta)) {
        delta += log_partition_prior(state.alloc, spec, v_prop) -
                 log_partition_prior(state.alloc, spec, v_old);
        delta += std::log(v_prop) - std::log(v_old);  // log-scale Jacobian
    }
    ++ps.attempt_count;
    ++ps.batch_attempts;
    if (std::isfinite(delta) && std::log(rng.u01p()) < delta) {
        ps.value = v_prop;
        ++ps.accept_count;
        ++ps.batch_accepts;
    }
    if (adapt && ps.batch_attempts >= 50) {
        const double rate = static_cast<double>(ps.batch_accepts) / ps.batch_attempts;
        if (rate > 0.5)
            ps.proposal_scale *= 1.2;
        else if (rate < 0.2)
            ps.proposal_scale /= 1.2;
        ps.batch_accepts = 0;
        ps.batch_attempts = 0;
    }
}

void sweep(ChainState& state, const ModelSpec& spec, Kernel& kernel, RngStream& rng, bool adapt) {
    update_thetas(state, spec, kernel, rng, adapt);  // (a)
    state.weights = sample_sticks_posterior(state.alloc, spec.family, state.precision.value,
                                            state.truncation(), rng);  // (b)
    if (spec.family == Family::sfm)
        allocate_sfm(state, spec, kernel, rng);  // (c), marginal over the slice
    else
        allocate_dpm(state, spec, kernel, rng);  // (c-1) + (c-2)
    mh_precision(state, spec, kernel, rng, adapt);  // (d)
    ++state.sweep_index;
}

ChainTrace run_chain(const ModelSpec& spec, const Dataset& data, const RunSettings& settings) {
    if (settings.keep < 1) throw std::invalid_argument("run_chain: keep must be >= 1");
    if (settings.thin < 1) throw std::invalid_argument("run_chain: thin must be >= 1");
    auto kernel = make_kernel(spec.kernel, data);
    RngStream rng(settings.seed, settings.stream);
    // an explicit init_k is validated as given; the default is clamped to N
    const int init_k = spec.init_k > 0 ? spec.init_k
                                       : std::min(spec.effective_init_k(), data.n_obs());
    ChainState state = initialize(spec, data, *kernel, init_k, rng);

    ChainTrace trace;
    trace.family = spec.family;
    trace.model_order = spec.family == Family::sfm ? spec.K : 0;
    trace.n_obs = data.n_obs();
    trace.theta_dim = kernel->flat_dim();
    trace.theta_names = kernel->flat_names();
    trace.has_shared_hyper = kernel->has_shared_hyper();
    trace.sweeps.reserve(settings.keep);

    try {
        for (int it = 0; it < settings.burnin; ++it) sweep(state, spec, *kernel, rng, true);
        for (int kept = 0; kept < settings.keep; ++kept) {
            for (int t = 0; t < settings.thin; ++t) sweep(state, spec, *kernel, rng, false);

            SweepRecord rec;
            rec.sweep = state.sweep_index;
            rec.kplus = state.alloc.kplus();
            rec.precision = state.precision.value;
            rec.shared_hyper = kernel->shared_hyper();
            double ll = 0.0;
            if (!spec.likelihood_off)
                for (int i = 0; i < state.alloc.n_obs; ++i)
                    ll += kernel->loglik_point(state.thetas[state.alloc.labels[i]], i);
            rec.loglik = ll;
            for (int k = 0; k < state.truncation(); ++k) {
                if (!settings.record_all_components && state.alloc.counts[k] == 0) continue;
                rec.component_ids.push_back(k);
                rec.component_weights.push_back(state.weights.weights[k]);
                rec.component_theta.push_back(kernel->flatten(state.thetas[k]));
            }
            if (settings.store_allocations) rec.allocations = state.alloc.labels;
            trace.sweeps.push_back(std::move(rec));
        }
    } catch (const std::exception& err) {
        throw std::runtime_error("run_chain: sweep " + std::to_string(state.sweep_index) +
                                 " failed: " + err.what());
    }
    return trace;
}

}  // namespace sparsemix
