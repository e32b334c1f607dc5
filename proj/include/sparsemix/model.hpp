#pragma once

#include <optional>

#include "sparsemix/kernel.hpp"
#include "sparsemix/weights.hpp"

namespace sparsemix {

struct GammaPrior {
    double a = 1.0;
    double b = 1.0;
    double mean() const { return a / b; }
};

/// Hyperprior on the precision parameter (e0 for SFM, alpha for DPM).
struct PrecisionPrior {
    enum class Type { gamma, uniform, fixed };
    Type type = Type::gamma;
    GammaPrior gamma;    // Type::gamma
    double value = 4.0;  // Type::fixed
    // Type::uniform is U(0, d/2); `upper` <= 0 means "derive d/2 from the
    // kernel's per-component parameter dimension".
    double upper = 0.0;
};

enum class MatchDirection { sfm_to_dpm, dpm_to_sfm };

/// Map a Gamma hyperprior across families through e0 ~ alpha / K:
/// SFM e0 ~ G(a, b) corresponds to DPM alpha ~ G(a, b/K) and conversely.
GammaPrior match_prior(MatchDirection direction, GammaPrior source, int K);

struct MatchRecord {
    Family source_family = Family::dpm;
    GammaPrior source;
    int K = 1;
};

struct ModelSpec {
    KernelSpec kernel;
    Family family = Family::sfm;
    int K = 10;  // mixture order; SFM only
    PrecisionPrior precision_prior;
    std::optional<MatchRecord> matched_from;
    double kappa = 0.8;  // DPM slice threshold decay
    int init_k = 0;      // 0 means: K for SFM, 10 for DPM
    bool likelihood_off = false;  // prior-simulation hook for property tests

    int effective_init_k() const {
        if (init_k > 0) return init_k;
        return family == Family::sfm ? K : 10;
    }
};

}  // namespace sparsemix
