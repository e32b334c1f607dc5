#pragma once

#include <map>
#include <vector>

#include "sparsemix/sampler.hpp"

namespace sparsemix {

struct KplusPosterior {
    std::map<int, double> pmf;  // over observed K+ values, sums to 1
    int mode = 0;               // ties broken toward smaller K+
    int n_sweeps = 0;
};

KplusPosterior kplus_posterior(const ChainTrace& trace);

struct ComponentSummary {
    std::vector<double> mean;      // per flattened theta coordinate
    std::vector<double> hpd_low;   // 95% HPD bounds
    std::vector<double> hpd_high;
    double weight_mean = 0.0;
    double weight_hpd_low = 0.0;
    double weight_hpd_high = 0.0;
    int n_draws = 0;
};

struct IdentifiedModel {
    int khat = 0;
    std::vector<ComponentSummary> components;  // khat entries, relabeled order
    std::vector<int> final_partition;          // 0-based labels in 0..khat-1
    int n_draws_used = 0;
    int n_draws_discarded = 0;
    std::vector<std::string> theta_names;
};

/// Identification in the point-process representation: pools the functional
/// of every non-empty component over sweeps with K+ == khat, clusters those
/// points with k-means into khat cells, keeps the sweeps whose khat points
/// land in khat distinct cells (discards and counts the rest), relabels
/// draws and allocations by cell, and reports per-cell summaries plus the
/// per-observation posterior-mode partition.
IdentifiedModel identify(const ChainTrace& trace, int khat, const Kernel& kernel);

/// Hubert-Arabie adjusted Rand index.
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// Misclassification proportion minimized over label bijections.
double error_rate(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Shortest interval containing `mass` of the draws.
std::pair<double, double> hpd_interval(std::vector<double> draws, double mass = 0.95);

/// Lloyd k-means with k-means++ seeding and multiple restarts; returns the
/// assignment of every point.
std::vector<int> kmeans_assign(const std::vector<std::vector<double>>& points, int k,
                               int restarts, RngStream& rng);

}  // namespace sparsemix
