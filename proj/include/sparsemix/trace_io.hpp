#pragma once

#include <string>
#include <vector>

#include "sparsemix/evidence.hpp"
#include "sparsemix/postprocess.hpp"
#include "sparsemix/simstudy.hpp"

namespace sparsemix {

/// Write a chain trace into a directory: trace.csv (sweep, kplus, precision,
/// loglik and b0 when present), theta.csv keyed by (sweep, component),
/// allocations.csv (when stored) and meta.json.
void write_trace(const ChainTrace& trace, const std::string& dir);

ChainTrace read_trace(const std::string& dir);

void write_kplus_posterior(const KplusPosterior& post, const std::string& path);

/// identified.json plus the final partition as CSV (1-based labels).
void write_identified(const IdentifiedModel& model, const std::string& dir);

struct EvidenceRow {
    int K = 0;
    std::string method;  // may be "unsupported"
    double log_value = 0.0;
    double std_error = 0.0;
    std::string note;
};
void write_evidence_csv(const std::vector<EvidenceRow>& rows, const std::string& path);

void write_prior_kplus_csv(const std::vector<double>& pmf, const std::string& path);

void write_simstudy_csv(const std::vector<SimCellResult>& results, const std::string& path);

void ensure_directory(const std::string& dir);

}  // namespace sparsemix
