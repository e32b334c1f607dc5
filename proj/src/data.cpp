#include "sparsemix/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sparsemix {

int Dataset::n_obs() const {
    return std::visit([](const auto& d) { return d.n_obs(); }, value);
}

const CategoricalData& Dataset::categorical() const {
    if (auto* p = std::get_if<CategoricalData>(&value)) return *p;
    throw std::invalid_argument("Dataset: categorical data expected");
}
const CountData& Dataset::counts() const {
    if (auto* p = std::get_if<CountData>(&value)) return *p;
    throw std::invalid_argument("Dataset: count data expected");
}
const RegressionData& Dataset::regression() const {
    if (auto* p = std::get_if<RegressionData>(&value)) return *p;
    throw std::invalid_argument("Dataset: regression data expected");
}
CategoricalData& Dataset::categorical() {
    if (auto* p = std::get_if<CategoricalData>(&value)) return *p;
    throw std::invalid_argument("Dataset: categorical data expected");
}
CountData& Dataset::counts() {
    if (auto* p = std::get_if<CountData>(&value)) return *p;
    throw std::invalid_argument("Dataset: count data expected");
}
RegressionData& Dataset::regression() {
    if (auto* p = std::get_if<RegressionData>(&value)) return *p;
    throw std::invalid_argument("Dataset: regression data expected");
}

Dataset load_fear() {
    // 4x3x3 cell counts, M major, then C, then F.
    static const int cells[4][3][3] = {
        {{5, 4, 1}, {0, 1, 2}, {2, 0, 2}},
        {{15, 4, 2}, {2, 3, 1}, {4, 4, 2}},
        {{3, 3, 4}, {0, 2, 3}, {1, 1, 7}},
        {{2, 1, 2}, {0, 1, 3}, {0, 3, 3}},
    };
    CategoricalData d;
    d.cardinalities = {4, 3, 3};
    d.feature_names = {"M", "C", "F"};
    for (int m = 0; m < 4; ++m)
        for (int c = 0; c < 3; ++c)
            for (int f = 0; f < 3; ++f)
                for (int rep = 0; rep < cells[m][c][f]; ++rep)
                    d.codes.push_back({m, c, f});
    if (d.n_obs() != 93) throw std::runtime_error("load_fear: table expansion is wrong");
    return Dataset{std::move(d)};
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t b = cell.find_first_not_of(' ');
        out.push_back(b == std::string::npos ? std::string() : cell.substr(b));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Dataset load_csv(const std::string& path, bool add_intercept) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("load_csv: empty file " + path);
    auto header = split_line(line);
    if (header.empty()) throw std::invalid_argument("load_csv: empty header in " + path);

    bool is_categorical = false;
    for (const auto& h : header)
        if (h.find(":cat") != std::string::npos) is_categorical = true;

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_line(line);
        if (cells.size() != header.size())
            throw std::invalid_argument("load_csv: ragged row in " + path);
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw std::invalid_argument("load_csv: no data rows in " + path);

    if (is_categorical) {
        CategoricalData d;
        for (const auto& h : header) {
            auto pos = h.find(":cat");
            if (pos == std::string::npos)
                throw std::invalid_argument("load_csv: mixed categorical/plain header in " + path);
            d.feature_names.push_back(h.substr(0, pos));
            int card = std::stoi(h.substr(pos + 4));
            if (card < 2) throw std::invalid_argument("load_csv: cardinality must be >= 2");
            d.cardinalities.push_back(card);
        }
        for (const auto& r : rows) {
            std::vector<int> codes(r.size());
            for (std::size_t j = 0; j < r.size(); ++j) {
                int code = std::stoi(r[j]);
                if (code < 1 || code > d.cardinalities[j])
                    throw std::invalid_argument("load_csv: code outside 1..D_j in " + path);
                codes[j] = code - 1;
            }
            d.codes.push_back(std::move(codes));
        }
        return Dataset{std::move(d)};
    }

    if (header.front() != "y")
        throw std::invalid_argument("load_csv: first column must be 'y' for count data");

    if (header.size() == 1) {
        CountData d;
        for (const auto& r : rows) {
            int y = std::stoi(r[0]);
            if (y < 0) throw std::invalid_argument("load_csv: negative count in " + path);
            d.y.push_back(y);
        }
        return Dataset{std::move(d)};
    }

    RegressionData d;
    if (add_intercept) d.covariate_names.push_back("const");
    for (std::size_t j = 1; j < header.size(); ++j) d.covariate_names.push_back(header[j]);
    for (const auto& r : rows) {
        int y = std::stoi(r[0]);
        if (y < 0) throw std::invalid_argument("load_csv: negative count in " + path);
        d.y.push_back(y);
        std::vector<double> x;
        if (add_intercept) x.push_back(1.0);
        for (std::size_t j = 1; j < r.size(); ++j) x.push_back(std::stod(r[j]));
        d.x.push_back(std::move(x));
    }
    return Dataset{std::move(d)};
}

void save_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("save_csv: cannot open " + path);
    if (const auto* cat = std::get_if<CategoricalData>(&data.value)) {
        for (int j = 0; j < cat->n_features(); ++j) {
            if (j) out << ',';
            std::string name = j < static_cast<int>(cat->feature_names.size())
                                   ? cat->feature_names[j]
                                   : ("x" + std::to_string(j + 1));
            out << name << ":cat" << cat->cardinalities[j];
        }
        out << '\n';
        for (const auto& row : cat->codes) {
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (j) out << ',';
                out << row[j] + 1;
            }
            out << '\n';
        }
        return;
    }
    if (const auto* cnt = std::get_if<CountData>(&data.value)) {
        out << "y\n";
        for (int y : cnt->y) out << y << '\n';
        return;
    }
    const auto& reg = data.regression();
    out << "y";
    for (std::size_t j = 0; j < reg.covariate_names.size(); ++j) {
        if (reg.covariate_names[j] == "const") continue;
        out << ',' << reg.covariate_names[j];
    }
    out << '\n';
    for (int i = 0; i < reg.n_obs(); ++i) {
        out << reg.y[i];
        for (std::size_t j = 0; j < reg.x[i].size(); ++j) {
            if (j < reg.covariate_names.size() && reg.covariate_names[j] == "const") continue;
            out << ',' << reg.x[i][j];
        }
        out << '\n';
    }
}

std::pair<Dataset, std::vector<int>> simulate_lca(const LcaDesign& design, RngStream& rng) {
    if (design.occurrence.empty() || design.class_weights.size() != design.occurrence.size())
        throw std::invalid_argument("simulate_lca: class weights and occurrence tables disagree");
    const int n_classes = static_cast<int>(design.occurrence.size());
    const int n_features = static_cast<int>(design.occurrence.front().size());
    for (const auto& cls : design.occurrence) {
        if (static_cast<int>(cls.size()) != n_features)
            throw std::invalid_argument("simulate_lca: ragged occurrence table");
        for (const auto& row : cls) {
            double s = 0.0;
            for (double p : row) s += p;
            if (std::fabs(s - 1.0) > 1e-9)
                throw std::invalid_argument("simulate_lca: occurrence row does not sum to 1");
        }
    }

    CategoricalData d;
    d.cardinalities.resize(n_features);
    for (int j = 0; j < n_features; ++j) {
        d.cardinalities[j] = static_cast<int>(design.occurrence.front()[j].size());
        d.feature_names.push_back("x" + std::to_string(j + 1));
    }
    std::vector<int> truth(design.n_obs);
    for (int i = 0; i < design.n_obs; ++i) {
        int cls = sample_categorical(design.class_weights, rng);
        truth[i] = cls;
        std::vector<int> row(n_features);
        for (int j = 0; j < n_features; ++j)
            row[j] = sample_categorical(design.occurrence[cls][j], rng);
        d.codes.push_back(std::move(row));
    }
    (void)n_classes;
    return {Dataset{std::move(d)}, std::move(truth)};
}

}  // namespace sparsemix
