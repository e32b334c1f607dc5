#pragma once

#include <vector>

#include "sparsemix/random.hpp"

namespace sparsemix {

/// Allocation bookkeeping for one chain: component label per observation plus
/// incrementally maintained occupancy counts.
struct AllocationState {
    std::vector<int> labels;  // 0-based component index, length n_obs
    std::vector<int> counts;  // occupancy per component, length = truncation
    int n_obs = 0;

    static AllocationState from_labels(std::vector<int> labels, int n_components);

    /// Move observation `i` to component `to` with O(1) count update.
    void move(int i, int to);

    /// Number of non-empty components.
    int kplus() const;

    /// Largest occupied component index + 1 (0 if nothing is occupied).
    int max_occupied() const;

    /// Full recount of `counts` from `labels`; throws on mismatch. Used by
    /// debug checks and tests against the incremental updates.
    void check_consistent() const;
};

/// log p(C | e0, K) for the sparse finite mixture, i.e. the marginal prior of
/// the induced partition under eta ~ Dir_K(e0):
///   K!/(K-K+)! * Gamma(K e0)/Gamma(N + K e0) * prod_{k occupied} Gamma(N_k+e0)/Gamma(e0)
/// Finite for e0 down to ~1e-300.
double log_prior_partition_sfm(const AllocationState& state, double e0, int K);
double log_prior_partition_sfm_counts(const std::vector<int>& counts, int n_obs, double e0, int K);

/// log p(C | alpha) for the Dirichlet process mixture:
///   alpha^{K+} * Gamma(alpha)/Gamma(N + alpha) * prod_{k occupied} Gamma(N_k)
double log_prior_partition_dpm(const AllocationState& state, double alpha);
double log_prior_partition_dpm_counts(const std::vector<int>& counts, int n_obs, double alpha);

/// Prior probability that a reallocated observation opens a new cluster,
/// given K+ non-empty clusters among the remaining n-1 observations.
/// SFM: e0 (K - K+^{-i}) / (n - 1 + e0 K); DPM: alpha / (n - 1 + alpha).
double prob_new_cluster_sfm(int n, double e0, int K, int kplus_minus);
double prob_new_cluster_dpm(int n, double alpha);

/// Monte Carlo estimate of the prior pmf of K+ for n observations under a
/// symmetric Dir_K(e0) weight prior: draw eta ~ Dir_K(e0), occupancies from a
/// multinomial, and tabulate the number of non-empty cells. Entry [k-1] is
/// P(K+ = k); the vector sums to 1.
std::vector<double> prior_kplus_pmf(int K, double e0, int n, int n_draws, RngStream& rng);

}  // namespace sparsemix
