#include "sparsemix/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsemix/special.hpp"

namespace sparsemix {

AllocationState AllocationState::from_labels(std::vector<int> labels, int n_components) {
    if (labels.empty()) throw std::invalid_argument("AllocationState: empty label vector");
    AllocationState st;
    st.n_obs = static_cast<int>(labels.size());
    st.labels = std::move(labels);
    st.counts.assign(n_components, 0);
    for (int lab : st.labels) {
        if (lab < 0 || lab >= n_components)
            throw std::invalid_argument("AllocationState: label outside [0, n_components)");
        ++st.counts[lab];
    }
    return st;
}

void AllocationState::move(int i, int to) {
    int from = labels[i];
    if (from == to) return;
    --counts[from];
    ++counts[to];
    labels[i] = to;
}

int AllocationState::kplus() const {
    int k = 0;
    for (int c : counts) k += (c > 0);
    return k;
}

int AllocationState::max_occupied() const {
    for (int k = static_cast<int>(counts.size()); k-- > 0;)
        if (counts[k] > 0) return k + 1;
    return 0;
}

void AllocationState::check_consistent() const {
    std::vector<int> recount(counts.size(), 0);
    for (int lab : labels) {
        if (lab < 0 || lab >= static_cast<int>(counts.size()))
            throw std::runtime_error("AllocationState: label outside count range");
        ++recount[lab];
    }
    if (recount != counts)
        throw std::runtime_error("AllocationState: incremental counts diverged from labels");
}

double log_prior_partition_sfm_counts(const std::vector<int>& counts, int n_obs, double e0,
                                      int K) {
    if (!(e0 > 0.0)) throw std::domain_error("log_prior_partition_sfm: e0 must be positive");
    int kp = 0;
    for (int c : counts) kp += (c > 0);
    if (K < kp)
        throw std::domain_error("log_prior_partition_sfm: K smaller than number of clusters");
    double lp = log_gamma_stable(static_cast<double>(K) + 1.0) -
                log_gamma_stable(static_cast<double>(K - kp) + 1.0);
    lp += log_gamma_stable(K * e0) - log_gamma_stable(n_obs + K * e0);
    const double lg_e0 = log_gamma_stable(e0);
    for (int c : counts)
        if (c > 0) lp += log_gamma_stable(c + e0) - lg_e0;
    return lp;
}

double log_prior_partition_sfm(const AllocationState& state, double e0, int K) {
    return log_prior_partition_sfm_counts(state.counts, state.n_obs, e0, K);
}

double log_prior_partition_dpm_counts(const std::vector<int>& counts, int n_obs, double alpha) {
    if (!(alpha > 0.0)) throw std::domain_error("log_prior_partition_dpm: alpha must be positive");
    int kp = 0;
    double lp = 0.0;
    for (int c : counts) {
        if (c > 0) {
            ++kp;
            lp += log_gamma_stable(static_cast<double>(c));
        }
    }
    lp += kp * std::log(alpha);
    lp += log_gamma_stable(alpha) - log_gamma_stable(n_obs + alpha);
    return lp;
}

double log_prior_partition_dpm(const AllocationState& state, double alpha) {
    return log_prior_partition_dpm_counts(state.counts, state.n_obs, alpha);
}

double prob_new_cluster_sfm(int n, double e0, int K, int kplus_minus) {
    if (n < 1 || kplus_minus < 1)
        throw std::domain_error("prob_new_cluster_sfm: need n >= 1 and kplus_minus >= 1");
    if (kplus_minus > K)
        throw std::domain_error("prob_new_cluster_sfm: kplus_minus exceeds K");
    return e0 * (K - kplus_minus) / (n - 1 + e0 * K);
}

double prob_new_cluster_dpm(int n, double alpha) {
    if (n < 1 || !(alpha > 0.0))
        throw std::domain_error("prob_new_cluster_dpm: need n >= 1 and alpha > 0");
    return alpha / (n - 1 + alpha);
}

std::vector<double> prior_kplus_pmf(int K, double e0, int n, int n_draws, RngStream& rng) {
    if (K < 1 || n < 1 || n_draws < 1)
        throw std::invalid_argument("prior_kplus_pmf: K, n, n_draws must be >= 1");
    std::vector<double> pmf(K, 0.0);
    if (K == 1) {
        pmf[0] = 1.0;
        return pmf;
    }
    const std::vector<double> conc(K, e0);
    for (int d = 0; d < n_draws; ++d) {
        auto eta = sample_dirichlet(conc, rng);
        auto occ = sample_multinomial(n, eta, rng);
        int kp = 0;
        for (int c : occ) kp += (c > 0);
        pmf[kp - 1] += 1.0;
    }
    for (auto& p : pmf) p /= n_draws;
    return pmf;
}

}  // namespace sparsemix
