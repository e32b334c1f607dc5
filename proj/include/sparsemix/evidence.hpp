#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sparsemix/sampler.hpp"

namespace sparsemix {

/// Raised when an evidence method does not apply (non-conjugate kernel,
/// enumeration too large). CLI surfaces report these as "unsupported" rows.
struct UnsupportedEvidence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvidenceEstimate {
    enum class Method { analytic, enumeration, bridge };
    double log_value = 0.0;
    double std_error = 0.0;  // 0 for the exact methods
    Method method = Method::analytic;
    int K = 1;
};

std::string evidence_method_name(EvidenceEstimate::Method method);

/// Closed-form marginal likelihood of the one-component model; conjugate
/// kernels only (categorical, Poisson with fixed b0).
EvidenceEstimate log_evidence_k1(const Kernel& kernel);

/// Exact p(y|K) = sum over all K^N labeled allocations of
/// p(S|e0,K) p(y|S), using the conjugate allocation-conditional evidence.
/// Guarded to K^N <= 10^7; independent oracle for the bridge estimator.
EvidenceEstimate log_evidence_enumeration(const Kernel& kernel, int K, double e0);

struct BridgeOptions {
    int s0 = 100;            // posterior subsequence defining the importance density
    int m_posterior = 2000;  // posterior draws entering the bridge
    int m_q = 2000;          // iid draws from the importance density
    int batches = 20;        // batched standard error
    double tol = 1e-6;       // convergence of the log estimate
    int max_iter = 500;
    std::uint64_t seed = 7;
};

/// Iterative bridge-sampling estimator between the unnormalized posterior and
/// the full-permutation mixture importance density built from the trace
/// (all K! relabelings of the complete-data posteriors of S0 stored draws).
/// The trace must come from a fixed-e0 SFM run with every component recorded
/// and allocations stored.
EvidenceEstimate log_evidence_bridge(Kernel& kernel, int K, double e0, const ChainTrace& trace,
                                     const BridgeOptions& options = {});

}  // namespace sparsemix
