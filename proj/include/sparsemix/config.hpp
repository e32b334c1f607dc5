#pragma once

#include <string>

#include "sparsemix/evidence.hpp"
#include "sparsemix/sampler.hpp"
#include "sparsemix/simstudy.hpp"

namespace sparsemix {

/// A fit run parsed from a JSON config file: model, chain settings, data
/// location ("builtin:fear" or a CSV path).
struct RunConfig {
    ModelSpec spec;
    RunSettings settings;
    std::string data = "builtin:fear";
    bool add_intercept = true;
};

struct EvidenceConfig {
    KernelSpec kernel;
    std::string data = "builtin:fear";
    bool add_intercept = true;
    double e0 = 4.0;
    int kmin = 1;
    int kmax = 5;
    std::string method = "auto";  // auto | analytic | enumeration | bridge
    int burnin = 2000;
    int keep = 4000;
    std::uint64_t seed = 20240801;
    BridgeOptions bridge;
};

struct SimStudyConfig {
    LcaDesign design;
    std::vector<SimCell> cells;
    SimStudySettings settings;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

EvidenceConfig parse_evidence_config(const std::string& json_text);
EvidenceConfig load_evidence_config(const std::string& path);

SimStudyConfig parse_simstudy_config(const std::string& json_text);
SimStudyConfig load_simstudy_config(const std::string& path);

/// Resolve "builtin:fear" or a CSV path into a dataset.
Dataset resolve_dataset(const std::string& name, bool add_intercept);

}  // namespace sparsemix
