#pragma once

#include <cstdint>
#include <vector>

namespace sparsemix {

/// Reproducible random stream identified by (seed, stream_id).
///
/// The internal generator is xoshiro256** with its state filled by splitmix64
/// applied to the (seed, stream_id) pair, which is the seeding procedure
/// recommended by the xoshiro authors. Identical (seed, stream_id) pairs give
/// bit-identical sequences on every platform; distinct stream ids give
/// streams that are independent for practical purposes, so each chain,
/// worker, or replication owns its own stream. Not thread-safe: never share
/// one stream across threads.
class RngStream {
  public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    /// uniform on [0,1)
    double u01();
    /// uniform on (0,1], safe as a log() argument
    double u01p();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

  private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
    std::uint64_t stream_id_;
};

// Distribution samplers. All of them are hand-rolled on top of RngStream so
// draws are reproducible across standard libraries; std::<distribution>
// implementations are not portable bit-for-bit.

double sample_uniform(double lo, double hi, RngStream& rng);
double sample_normal(RngStream& rng);  // standard normal

/// Gamma(shape, rate). Valid for any shape > 0; shapes below 1 use the
/// boost G(a) = G(a+1) * U^(1/a), which the small-e0 posterior updates need.
double sample_gamma(double shape, double rate, RngStream& rng);

/// log of a Gamma(shape, rate) draw; does not underflow for tiny shapes
/// (the linear draw would round to zero once shape drops below ~1e-2 and the
/// realized value falls under DBL_MIN).
double sample_log_gamma(double shape, double rate, RngStream& rng);

double sample_beta(double a, double b, RngStream& rng);

/// Beta draw returned as (log x, log(1-x)); stable when a or b is tiny.
void sample_log_beta(double a, double b, RngStream& rng, double& log_x, double& log_1mx);

/// Dirichlet draw; computed in log space and renormalized so the result sums
/// to 1 even for very small concentrations.
std::vector<double> sample_dirichlet(const std::vector<double>& concentration, RngStream& rng);

/// Index draw proportional to nonnegative (unnormalized) weights.
int sample_categorical(const std::vector<double>& weights, RngStream& rng);

/// Index draw from unnormalized log weights (-inf entries are excluded).
int sample_categorical_log(const std::vector<double>& log_weights, RngStream& rng);

int sample_poisson(double mean, RngStream& rng);

/// Occupancy counts of n draws over the given probability vector.
std::vector<int> sample_multinomial(int n, const std::vector<double>& probs, RngStream& rng);

}  // namespace sparsemix
