#include "sparsemix/simstudy.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace sparsemix {

namespace {

constexpr std::uint64_t kDataStreamBase = 1u << 20;
constexpr std::uint64_t kChainStreamBase = 1u << 24;

SimRepResult run_one(const LcaDesign& design, const SimCell& cell,
                     const SimStudySettings& settings, int cell_index, int rep) {
    SimRepResult res;
    res.replication = rep;
    try {
        RngStream data_rng(settings.seed, kDataStreamBase + rep);
        auto [data, truth] = simulate_lca(design, data_rng);

        RunSettings rs;
        rs.burnin = settings.burnin;
        rs.keep = settings.keep;
        rs.thin = settings.thin;
        rs.seed = settings.seed;
        rs.stream = kChainStreamBase + static_cast<std::uint64_t>(cell_index) * 100000 + rep;
        auto trace = run_chain(cell.spec, data, rs);

        auto post = kplus_posterior(trace);
        res.khat = post.mode;
        const auto prec = trace.precision_column();
        res.precision_mean =
            std::accumulate(prec.begin(), prec.end(), 0.0) / prec.size();

        auto kernel = make_kernel(cell.spec.kernel, data);
        auto ident = identify(trace, post.mode, *kernel);
        res.ari = adjusted_rand_index(ident.final_partition, truth);
        res.err = error_rate(ident.final_partition, truth);
        res.ok = true;
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
    }
    return res;
}

}  // namespace

std::vector<SimCellResult> run_simulation_study(const LcaDesign& design,
                                                const std::vector<SimCell>& cells,
                                                const SimStudySettings& settings) {
    const int n_cells = static_cast<int>(cells.size());
    const int n_reps = settings.n_replications;
    std::vector<SimCellResult> results(n_cells);
    for (int c = 0; c < n_cells; ++c) {
        const auto& spec = cells[c].spec;
        results[c].label = cells[c].label;
        results[c].method = spec.family == Family::sfm ? "SFM" : "DPM";
        results[c].K = spec.family == Family::sfm ? spec.K : 0;
        char prior[64];
        switch (spec.precision_prior.type) {
            case PrecisionPrior::Type::gamma:
                std::snprintf(prior, sizeof prior, "G(%g,%g)", spec.precision_prior.gamma.a,
                              spec.precision_prior.gamma.b);
                break;
            case PrecisionPrior::Type::uniform:
                std::snprintf(prior, sizeof prior, "U(0,d/2)");
                break;
            case PrecisionPrior::Type::fixed:
                std::snprintf(prior, sizeof prior, "fixed(%g)", spec.precision_prior.value);
                break;
        }
        results[c].prior = prior;
        results[c].reps.resize(n_reps);
    }
    if (n_reps == 0) return results;

    const int n_tasks = n_cells * n_reps;
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int task = next.fetch_add(1);
            if (task >= n_tasks) return;
            int c = task / n_reps;
            int r = task % n_reps;
            results[c].reps[r] = run_one(design, cells[c], settings, c, r);
        }
    };
    const int n_workers = std::max(1, settings.workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (auto& cell : results) {
        double sp = 0.0, sk = 0.0, sa = 0.0, se = 0.0;
        for (const auto& rep : cell.reps) {
            if (!rep.ok) continue;
            ++cell.n_ok;
            sp += rep.precision_mean;
            sk += rep.khat;
            sa += rep.ari;
            se += rep.err;
        }
        if (cell.n_ok > 0) {
            cell.mean_precision = sp / cell.n_ok;
            cell.mean_khat = sk / cell.n_ok;
            cell.mean_ari = sa / cell.n_ok;
            cell.mean_err = se / cell.n_ok;
        }
    }
    return results;
}

}  // namespace sparsemix
