#pragma once

#include <string>
#include <variant>
#include <vector>

#include "sparsemix/random.hpp"

namespace sparsemix {

/// Multivariate categorical observations. Codes are stored 0-based; the CSV
/// surface uses 1-based codes as is conventional for coded survey data.
struct CategoricalData {
    std::vector<std::vector<int>> codes;  // n_obs x n_features
    std::vector<int> cardinalities;       // D_j per feature
    std::vector<std::string> feature_names;

    int n_obs() const { return static_cast<int>(codes.size()); }
    int n_features() const { return static_cast<int>(cardinalities.size()); }
};

/// Univariate counts.
struct CountData {
    std::vector<int> y;
    int n_obs() const { return static_cast<int>(y.size()); }
};

/// Count outcomes with a covariate row per observation (intercept column
/// included; offsets such as log exposure enter as ordinary columns).
struct RegressionData {
    std::vector<int> y;
    std::vector<std::vector<double>> x;  // n_obs x n_covariates
    std::vector<std::string> covariate_names;

    int n_obs() const { return static_cast<int>(y.size()); }
    int n_covariates() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
};

struct Dataset {
    std::variant<CategoricalData, CountData, RegressionData> value;

    int n_obs() const;
    const CategoricalData& categorical() const;
    const CountData& counts() const;
    const RegressionData& regression() const;
    CategoricalData& categorical();
    CountData& counts();
    RegressionData& regression();
};

/// Infant temperament data: N=93 children scored on motor activity (4
/// categories), fret/cry behavior (3) and fear of unfamiliar events (3),
/// expanded from the published 4x3x3 contingency table.
Dataset load_fear();

/// CSV ingestion. Column headers decide the dataset type:
///   - any header of the form "name:catD"  -> categorical (1-based codes),
///   - a single column "y"                 -> counts,
///   - "y" plus further numeric columns    -> count regression.
/// `add_intercept` prepends a constant-1 column for regression data.
Dataset load_csv(const std::string& path, bool add_intercept = true);

/// Write a dataset back out in the schema load_csv reads.
void save_csv(const Dataset& data, const std::string& path);

/// Two-class latent class design used for synthetic data; defaults follow the
/// three-feature setup with D = (3, 3, 4) and equal class weights.
struct LcaDesign {
    int n_obs = 100;
    std::vector<double> class_weights = {0.5, 0.5};
    // class x feature x category occurrence probabilities
    std::vector<std::vector<std::vector<double>>> occurrence = {
        {{0.1, 0.1, 0.8}, {0.1, 0.7, 0.2}, {0.7, 0.1, 0.1, 0.1}},
        {{0.2, 0.6, 0.2}, {0.2, 0.2, 0.6}, {0.2, 0.1, 0.1, 0.6}},
    };
};

/// Draw a data set from the latent class design; returns the data and the
/// 0-based true class labels.
std::pair<Dataset, std::vector<int>> simulate_lca(const LcaDesign& design, RngStream& rng);

}  // namespace sparsemix
