#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsemix/model.hpp"
#include "sparsemix/partition.hpp"

namespace sparsemix {

/// Precision parameter (e0 or alpha) together with its MH bookkeeping.
struct PrecisionState {
    double value = 1.0;
    double proposal_scale = 0.5;
    long accept_count = 0;
    long attempt_count = 0;
    long batch_accepts = 0;
    long batch_attempts = 0;

    double acceptance_rate() const {
        return attempt_count == 0 ? 0.0 : static_cast<double>(accept_count) / attempt_count;
    }
};

/// Full state of one chain between sweeps.
struct ChainState {
    AllocationState alloc;
    WeightState weights;
    std::vector<Theta> thetas;  // one per instantiated component
    PrecisionState precision;
    long sweep_index = 0;

    int truncation() const { return static_cast<int>(thetas.size()); }
};

struct SweepRecord {
    long sweep = 0;
    int kplus = 0;
    double precision = 0.0;
    double loglik = 0.0;  // complete-data log-likelihood
    double shared_hyper = std::numeric_limits<double>::quiet_NaN();
    std::vector<int> component_ids;              // recorded (0-based) component indices
    std::vector<double> component_weights;       // eta_k per recorded component
    std::vector<std::vector<double>> component_theta;  // flattened draws
    std::vector<int> allocations;                // empty when not stored
};

struct ChainTrace {
    Family family = Family::sfm;
    int model_order = 0;  // K for SFM, 0 for DPM
    int n_obs = 0;
    int theta_dim = 0;
    bool has_shared_hyper = false;
    std::vector<std::string> theta_names;
    std::vector<SweepRecord> sweeps;

    std::vector<int> kplus_column() const;
    std::vector<double> precision_column() const;
};

struct RunSettings {
    int burnin = 8000;
    int keep = 8000;
    int thin = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;  // chain id; distinct chains use distinct streams
    bool record_all_components = false;  // evidence runs need every component
    bool store_allocations = true;
};

/// Initial classification: a k-means style pass into init_k groups (k-modes
/// for categorical data, quantile bins on the response for counts and
/// regression), precision at its prior mean, theta from the complete-data
/// posterior and sticks from their posterior given that classification.
ChainState initialize(const ModelSpec& spec, const Dataset& data, Kernel& kernel, int init_k,
                      RngStream& rng);

/// One full pass of the four sampling steps: (a) component parameters with
/// empty components drawn from the prior, (b) sticks and weights, (c)
/// allocations (direct draw for SFM, slice step with random truncation for
/// DPM), (d) precision MH.
void sweep(ChainState& state, const ModelSpec& spec, Kernel& kernel, RngStream& rng,
           bool adapt = false);

/// One MH move on the precision parameter given the current partition;
/// no-op for a fixed precision prior.
void mh_precision(ChainState& state, const ModelSpec& spec, const Kernel& kernel, RngStream& rng,
                  bool adapt = false);

ChainTrace run_chain(const ModelSpec& spec, const Dataset& data, const RunSettings& settings);

/// Initial classifications used by `initialize`; exposed for tests.
std::vector<int> initial_classification(const Dataset& data, int init_k, RngStream& rng);

double precision_prior_mean(const PrecisionPrior& prior, const Kernel& kernel);
double precision_prior_upper(const PrecisionPrior& prior, const Kernel& kernel);

}  // namespace sparsemix
