#include "sparsemix/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sparsemix {

KplusPosterior kplus_posterior(const ChainTrace& trace) {
    if (trace.sweeps.empty()) throw std::invalid_argument("kplus_posterior: empty trace");
    KplusPosterior post;
    post.n_sweeps = static_cast<int>(trace.sweeps.size());
    std::map<int, int> freq;
    for (const auto& s : trace.sweeps) ++freq[s.kplus];
    int best_count = -1;
    for (const auto& [k, c] : freq) {
        post.pmf[k] = static_cast<double>(c) / post.n_sweeps;
        if (c > best_count) {  // map iterates ascending, so ties keep the smaller K+
            best_count = c;
            post.mode = k;
        }
    }
    return post;
}

std::pair<double, double> hpd_interval(std::vector<double> draws, double mass) {
    if (draws.empty()) throw std::invalid_argument("hpd_interval: no draws");
    std::sort(draws.begin(), draws.end());
    const int n = static_cast<int>(draws.size());
    int window = std::max(1, static_cast<int>(std::ceil(mass * n)));
    window = std::min(window, n);
    double best_width = std::numeric_limits<double>::infinity();
    int best_lo = 0;
    for (int lo = 0; lo + window - 1 < n; ++lo) {
        double width = draws[lo + window - 1] - draws[lo];
        if (width < best_width) {
            best_width = width;
            best_lo = lo;
        }
    }
    return {draws[best_lo], draws[best_lo + window - 1]};
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

struct KmeansResult {
    std::vector<int> assign;
    std::vector<std::vector<double>> centers;
    double inertia = std::numeric_limits<double>::infinity();
};

KmeansResult kmeans_once(const std::vector<std::vector<double>>& points, int k, RngStream& rng) {
    const int n = static_cast<int>(points.size());
    const int dim = static_cast<int>(points.front().size());
    KmeansResult res;
    res.centers.reserve(k);

    // k-means++ seeding
    res.centers.push_back(points[rng.next_u64() % n]);
    std::vector<double> d2(n);
    while (static_cast<int>(res.centers.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : res.centers) best = std::min(best, sq_dist(points[i], c));
            d2[i] = best;
            total += best;
        }
        if (!(total > 0.0)) {
            res.centers.push_back(points[rng.next_u64() % n]);
            continue;
        }
        double target = rng.u01() * total;
        int pick = n - 1;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += d2[i];
            if (target < acc) {
                pick = i;
                break;
            }
        }
        res.centers.push_back(points[pick]);
    }

    res.assign.assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = sq_dist(points[i], res.centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (res.assign[i] != best) {
                res.assign[i] = best;
                changed = true;
            }
        }
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            ++counts[res.assign[i]];
            for (int d = 0; d < dim; ++d) sums[res.assign[i]][d] += points[i][d];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                res.centers[c] = points[rng.next_u64() % n];  // restart a dead center
                continue;
            }
            for (int d = 0; d < dim; ++d) res.centers[c][d] = sums[c][d] / counts[c];
        }
        if (!changed && iter > 0) break;
    }
    res.inertia = 0.0;
    for (int i = 0; i < n; ++i) res.inertia += sq_dist(points[i], res.centers[res.assign[i]]);
    return res;
}

}  // namespace

std::vector<int> kmeans_assign(const std::vector<std::vector<double>>& points, int k,
                               int restarts, RngStream& rng) {
    if (points.empty()) throw std::invalid_argument("kmeans_assign: no points");
    if (k < 1 || k > static_cast<int>(points.size()))
        throw std::invalid_argument("kmeans_assign: bad number of centers");
    KmeansResult best;
    for (int r = 0; r < restarts; ++r) {
        auto res = kmeans_once(points, k, rng);
        if (res.inertia < best.inertia) best = std::move(res);
    }
    return best.assign;
}

IdentifiedModel identify(const ChainTrace& trace, int khat, const Kernel& kernel) {
    if (khat < 1) throw std::invalid_argument("identify: khat must be >= 1");
    std::vector<int> qualifying;
    for (int s = 0; s < static_cast<int>(trace.sweeps.size()); ++s)
        if (trace.sweeps[s].kplus == khat) qualifying.push_back(s);
    if (static_cast<int>(qualifying.size()) < 50)
        throw std::runtime_error("identify: only " + std::to_string(qualifying.size()) +
                                 " sweeps with K+ = " + std::to_string(khat) +
                                 " (need at least 50)");

    IdentifiedModel model;
    model.khat = khat;
    model.theta_names = trace.theta_names;

    // Gather non-empty component functionals in the point-process
    // representation. Recorded components may include empty ones when the
    // trace stores everything, so filter by membership in the allocations.
    struct SweepPoints {
        int sweep_idx;
        std::vector<int> comp_ids;  // original component indices, khat of them
        std::vector<int> point_idx; // row in the pooled point matrix
    };
    std::vector<SweepPoints> sweep_points;
    std::vector<std::vector<double>> points;
    for (int s : qualifying) {
        const auto& rec = trace.sweeps[s];
        SweepPoints sp;
        sp.sweep_idx = s;
        std::vector<char> occupied;
        if (!rec.allocations.empty()) {
            int max_comp = 0;
            for (int c : rec.component_ids) max_comp = std::max(max_comp, c);
            occupied.assign(max_comp + 1, 0);
            for (int lab : rec.allocations)
                if (lab <= max_comp) occupied[lab] = 1;
        }
        for (std::size_t j = 0; j < rec.component_ids.size(); ++j) {
            const int comp = rec.component_ids[j];
            if (!occupied.empty() && !occupied[comp]) continue;
            sp.comp_ids.push_back(comp);
            sp.point_idx.push_back(static_cast<int>(points.size()));
            points.push_back(kernel.functional(kernel.unflatten(rec.component_theta[j])));
        }
        if (static_cast<int>(sp.comp_ids.size()) != khat)
            throw std::runtime_error("identify: trace records " +
                                     std::to_string(sp.comp_ids.size()) +
                                     " non-empty components in a sweep with K+ = " +
                                     std::to_string(khat));
        sweep_points.push_back(std::move(sp));
    }

    std::vector<int> cells;
    if (khat == 1) {
        cells.assign(points.size(), 0);
    } else {
        RngStream rng(trace.n_obs * 2654435761u + khat, 977);
        cells = kmeans_assign(points, khat, 20, rng);
    }

    // A sweep is uniquely labeled when its khat points land in khat distinct
    // cells; everything else is discarded and counted.
    const bool has_alloc = !trace.sweeps[qualifying.front()].allocations.empty();
    std::vector<std::vector<int>> label_votes;
    if (has_alloc)
        label_votes.assign(trace.n_obs, std::vector<int>(khat, 0));
    std::vector<std::vector<std::vector<double>>> cell_theta(khat);
    std::vector<std::vector<double>> cell_weight(khat);

    for (const auto& sp : sweep_points) {
        std::vector<int> cell_of(khat);
        std::vector<char> seen(khat, 0);
        bool unique = true;
        for (int j = 0; j < khat; ++j) {
            int c = cells[sp.point_idx[j]];
            cell_of[j] = c;
            if (seen[c]) unique = false;
            seen[c] = 1;
        }
        if (!unique) {
            ++model.n_draws_discarded;
            continue;
        }
        ++model.n_draws_used;
        const auto& rec = trace.sweeps[sp.sweep_idx];
        std::vector<int> comp_to_cell;
        for (int j = 0; j < khat; ++j) {
            // locate the record row for this component id
            for (std::size_t r = 0; r < rec.component_ids.size(); ++r) {
                if (rec.component_ids[r] == sp.comp_ids[j]) {
                    cell_theta[cell_of[j]].push_back(rec.component_theta[r]);
                    cell_weight[cell_of[j]].push_back(rec.component_weights[r]);
                    break;
                }
            }
        }
        if (has_alloc) {
            std::vector<int> comp_cell_map;
            int max_comp = *std::max_element(sp.comp_ids.begin(), sp.comp_ids.end());
            comp_cell_map.assign(max_comp + 1, -1);
            for (int j = 0; j < khat; ++j) comp_cell_map[sp.comp_ids[j]] = cell_of[j];
            for (int i = 0; i < trace.n_obs; ++i) {
                int lab = rec.allocations[i];
                if (lab <= max_comp && comp_cell_map[lab] >= 0)
                    ++label_votes[i][comp_cell_map[lab]];
            }
        }
    }

    const int total_qualifying = model.n_draws_used + model.n_draws_discarded;
    if (model.n_draws_used == 0 || 2 * model.n_draws_discarded > total_qualifying) {
        // more than half of the qualifying sweeps could not be uniquely labeled
        throw std::runtime_error("identify: " + std::to_string(model.n_draws_discarded) + " of " +
                                 std::to_string(total_qualifying) +
                                 " qualifying sweeps were not uniquely labeled");
    }

    const int dim = trace.theta_dim;
    for (int c = 0; c < khat; ++c) {
        ComponentSummary cs;
        cs.n_draws = static_cast<int>(cell_theta[c].size());
        cs.mean.assign(dim, 0.0);
        cs.hpd_low.assign(dim, 0.0);
        cs.hpd_high.assign(dim, 0.0);
        for (int d = 0; d < dim; ++d) {
            std::vector<double> col;
            col.reserve(cs.n_draws);
            for (const auto& row : cell_theta[c]) col.push_back(row[d]);
            cs.mean[d] = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
            auto [lo, hi] = hpd_interval(col, 0.95);
            cs.hpd_low[d] = lo;
            cs.hpd_high[d] = hi;
        }
        cs.weight_mean = std::accumulate(cell_weight[c].begin(), cell_weight[c].end(), 0.0) /
                         cell_weight[c].size();
        auto [wlo, whi] = hpd_interval(cell_weight[c], 0.95);
        cs.weight_hpd_low = wlo;
        cs.weight_hpd_high = whi;
        model.components.push_back(std::move(cs));
    }

    if (has_alloc) {
        model.final_partition.resize(trace.n_obs);
        for (int i = 0; i < trace.n_obs; ++i) {
            int best = 0;
            for (int c = 1; c < khat; ++c)
                if (label_votes[i][c] > label_votes[i][best]) best = c;
            model.final_partition[i] = best;
        }
    }
    return model;
}

namespace {

long long choose2(long long n) { return n * (n - 1) / 2; }

// Contingency table over compacted label ids.
std::vector<std::vector<long long>> contingency(const std::vector<int>& a,
                                                const std::vector<int>& b, int& na, int& nb) {
    std::map<int, int> ida, idb;
    for (int x : a)
        if (!ida.count(x)) {
            int next = static_cast<int>(ida.size());
            ida[x] = next;
        }
    for (int x : b)
        if (!idb.count(x)) {
            int next = static_cast<int>(idb.size());
            idb[x] = next;
        }
    na = static_cast<int>(ida.size());
    nb = static_cast<int>(idb.size());
    std::vector<std::vector<long long>> table(na, std::vector<long long>(nb, 0));
    for (std::size_t i = 0; i < a.size(); ++i) ++table[ida[a[i]]][idb[b[i]]];
    return table;
}

}  // namespace

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("adjusted_rand_index: label vectors must match in length");
    int na = 0, nb = 0;
    auto table = contingency(a, b, na, nb);
    long long sum_ij = 0;
    std::vector<long long> row_sum(na, 0), col_sum(nb, 0);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
            sum_ij += choose2(table[i][j]);
            row_sum[i] += table[i][j];
            col_sum[j] += table[i][j];
        }
    long long sum_a = 0, sum_b = 0;
    for (long long r : row_sum) sum_a += choose2(r);
    for (long long c : col_sum) sum_b += choose2(c);
    const double total = static_cast<double>(choose2(static_cast<long long>(a.size())));
    const double expected = static_cast<double>(sum_a) * static_cast<double>(sum_b) / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // both partitions trivial
    return (static_cast<double>(sum_ij) - expected) / (max_index - expected);
}

double error_rate(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size() || predicted.empty())
        throw std::invalid_argument("error_rate: label vectors must match in length");
    int na = 0, nb = 0;
    auto table = contingency(predicted, truth, na, nb);
    const int n = std::max(na, nb);

    // Hungarian assignment maximizing matched counts (as costs, minimizing
    // the negated table), padded to square.
    std::vector<std::vector<double>> cost(n + 1, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) cost[i + 1][j + 1] = -static_cast<double>(table[i][j]);

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    long long matched = 0;
    for (int j = 1; j <= n; ++j) {
        int i = p[j];
        if (i >= 1 && i <= na && j <= nb) matched += table[i - 1][j - 1];
    }
    return 1.0 - static_cast<double>(matched) / static_cast<double>(predicted.size());
}

}  // namespace sparsemix
