#pragma once

#include <vector>

#include "sparsemix/partition.hpp"
#include "sparsemix/random.hpp"

namespace sparsemix {

enum class Family { sfm, dpm };

/// Stick-breaking state. Weights are maintained in log space as well because
/// sparse precision values routinely produce sticks below 1e-300.
struct WeightState {
    Family family = Family::sfm;
    std::vector<double> log_sticks;     // log nu_k
    std::vector<double> log_1m_sticks;  // log(1 - nu_k)
    std::vector<double> log_weights;    // log eta_k
    std::vector<double> weights;        // eta_k

    int truncation() const { return static_cast<int>(log_sticks.size()); }

    /// log(1 - sum_k eta_k) = sum_k log(1 - nu_k); exactly -inf in finite mode.
    double log_residual() const;

    std::vector<double> sticks() const;

    /// Recompute log_weights/weights from the stick representation.
    void refresh_weights();

    /// Append one stick given as (log nu, log(1-nu)).
    void push_stick(double log_nu, double log_1m_nu);
};

/// eta_1 = nu_1, eta_k = nu_k * prod_{j<k} (1 - nu_j).
/// In finite mode the last stick must equal 1 so the weights close to sum 1.
std::vector<double> sticks_to_weights(const std::vector<double>& sticks);

/// Recover sticks from weights: nu_k = eta_k / (1 - sum_{j<k} eta_j).
std::vector<double> weights_to_sticks(const std::vector<double>& weights);

/// Posterior stick update, Beta(a_k + N_k, b_k + sum_{l>k} N_l) with
///   SFM: a_k = e0, b_k = (K-k) e0 for k < K and nu_K = 1 (K = spec order);
///   DPM: a_k = 1,  b_k = alpha for every instantiated k.
/// `truncation` is the number of sticks to draw; for SFM it must equal K.
WeightState sample_sticks_posterior(const AllocationState& alloc, Family family,
                                    double precision, int truncation, RngStream& rng);

/// Slice thresholds xi_k, k = 1..count. DPM: (1-kappa) kappa^{k-1};
/// SFM: all ones (the slice step degenerates).
std::vector<double> slice_thresholds(Family family, double kappa, int count);
double slice_threshold(Family family, double kappa, int k);  // k is 1-based

/// Extend a DPM weight state with prior sticks nu ~ Beta(1, alpha) until the
/// residual mass drops below `slice_minimum` and at least `min_levels` sticks
/// exist; returns the smallest prefix length whose residual already satisfies
/// the inequality. Throws if `hard_cap` levels are exceeded.
int required_truncation(WeightState& w, double slice_minimum, double alpha, int min_levels,
                        int hard_cap, RngStream& rng);

/// Hard cap used by the sampler: 10 * ceil(alpha * log n) + 50.
int truncation_hard_cap(double alpha, int n_obs);

}  // namespace sparsemix
