#include <atomic>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "sparsemix/config.hpp"
#include "sparsemix/trace_io.hpp"

using namespace sparsemix;

namespace {

// Exit codes: 0 success, 2 user/config error, 3 numerical or runtime failure.
constexpr int kExitUserError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonArgs {
    std::string config_path;
    std::string data_override;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    int chains = 1;
    int workers = 1;
};

RunConfig load_fit_config(const CommonArgs& args) {
    RunConfig cfg = load_run_config(args.config_path);
    if (!args.data_override.empty()) cfg.data = args.data_override;
    if (args.seed_override) cfg.settings.seed = *args.seed_override;
    return cfg;
}

int cmd_fit(const CommonArgs& args) {
    RunConfig cfg = load_fit_config(args);
    Dataset data = resolve_dataset(cfg.data, cfg.add_intercept);
    ensure_directory(args.out_dir);

    std::vector<ChainTrace> traces(args.chains);
    std::vector<std::string> failures(args.chains);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int c = next.fetch_add(1);
            if (c >= args.chains) return;
            RunSettings settings = cfg.settings;
            settings.stream = c;
            try {
                traces[c] = run_chain(cfg.spec, data, settings);
            } catch (const std::exception& e) {
                failures[c] = e.what();
            }
        }
    };
    const int n_workers = std::max(1, std::min(args.workers, args.chains));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (int c = 0; c < args.chains; ++c)
        if (!failures[c].empty()) throw std::runtime_error("chain " + std::to_string(c) +
                                                           " failed: " + failures[c]);

    // Pool kept sweeps over chains for the K+ posterior; identification and
    // the trace files use the pooled draws as well. Sweep ids are renumbered
    // so the pooled files stay uniquely keyed.
    ChainTrace pooled = traces[0];
    for (int c = 1; c < args.chains; ++c)
        for (auto& s : traces[c].sweeps) pooled.sweeps.push_back(std::move(s));
    if (args.chains > 1)
        for (std::size_t s = 0; s < pooled.sweeps.size(); ++s)
            pooled.sweeps[s].sweep = static_cast<long>(s + 1);

    std::string trace_dir = args.out_dir;
    if (args.chains > 1) {
        for (int c = 0; c < args.chains; ++c)
            write_trace(traces[c], args.out_dir + "/chain" + std::to_string(c));
    }
    write_trace(pooled, trace_dir);

    auto post = kplus_posterior(pooled);
    write_kplus_posterior(post, args.out_dir + "/kplus_posterior.json");

    auto kernel = make_kernel(cfg.spec.kernel, data);
    try {
        auto ident = identify(pooled, post.mode, *kernel);
        write_identified(ident, args.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "identification skipped: " << e.what() << '\n';
    }
    std::cout << "K+ mode: " << post.mode << "  (P = " << post.pmf.at(post.mode) << ")\n";
    std::cout << "outputs in " << args.out_dir << '\n';
    return 0;
}

int cmd_evidence(const CommonArgs& args, int kmin_flag, int kmax_flag) {
    EvidenceConfig cfg = load_evidence_config(args.config_path);
    if (!args.data_override.empty()) cfg.data = args.data_override;
    if (args.seed_override) cfg.seed = *args.seed_override;
    if (kmin_flag > 0) cfg.kmin = kmin_flag;
    if (kmax_flag > 0) cfg.kmax = kmax_flag;
    Dataset data = resolve_dataset(cfg.data, cfg.add_intercept);
    ensure_directory(args.out_dir);

    // The Poisson evidence path fixes b0 at its prior mean so the kernel is
    // fully conjugate.
    KernelSpec kspec = cfg.kernel;
    if (kspec.type == KernelSpec::Type::poisson && !kspec.poisson.fixed_b0) {
        auto probe = make_kernel(kspec, data);
        kspec.poisson.fixed_b0 = probe->shared_hyper();
    }

    std::vector<EvidenceRow> rows;
    for (int K = cfg.kmin; K <= cfg.kmax; ++K) {
        EvidenceRow row;
        row.K = K;
        try {
            auto kernel = make_kernel(kspec, data);
            EvidenceEstimate est;
            const bool want_enum = cfg.method == "enumeration";
            if (K == 1 && cfg.method != "enumeration") {
                est = log_evidence_k1(*kernel);
            } else if (want_enum ||
                       (cfg.method == "auto" &&
                        std::pow(static_cast<double>(K), data.n_obs()) <= 1e6)) {
                est = log_evidence_enumeration(*kernel, K, cfg.e0);
            } else if (cfg.method == "analytic") {
                throw UnsupportedEvidence("analytic evidence exists only for K=1");
            } else {
                ModelSpec spec;
                spec.kernel = kspec;
                spec.family = Family::sfm;
                spec.K = K;
                spec.precision_prior.type = PrecisionPrior::Type::fixed;
                spec.precision_prior.value = cfg.e0;
                spec.init_k = K;
                RunSettings rs;
                rs.burnin = cfg.burnin;
                rs.keep = cfg.keep;
                rs.seed = cfg.seed;
                rs.stream = 40000 + K;
                rs.record_all_components = true;
                rs.store_allocations = true;
                auto trace = run_chain(spec, data, rs);
                BridgeOptions opts = cfg.bridge;
                opts.seed = cfg.seed + K;
                est = log_evidence_bridge(*kernel, K, cfg.e0, trace, opts);
            }
            row.method = evidence_method_name(est.method);
            row.log_value = est.log_value;
            row.std_error = est.std_error;
        } catch (const UnsupportedEvidence& e) {
            row.method = "unsupported";
            row.note = e.what();
        }
        rows.push_back(row);
        std::cout << "K=" << row.K << "  " << row.method;
        if (row.method != "unsupported")
            std::cout << "  log p(y|K) = " << row.log_value << "  se = " << row.std_error;
        std::cout << '\n';
    }
    write_evidence_csv(rows, args.out_dir + "/evidence.csv");
    return 0;
}

int cmd_prior_kplus(int K, double e0, int n, long draws, std::uint64_t seed,
                    const std::string& out_dir) {
    if (draws < 1) throw std::invalid_argument("prior-kplus: draws must be >= 1");
    ensure_directory(out_dir);
    RngStream rng(seed, 0);
    auto pmf = prior_kplus_pmf(K, e0, n, static_cast<int>(draws), rng);
    write_prior_kplus_csv(pmf, out_dir + "/prior_kplus.csv");
    for (std::size_t k = 0; k < pmf.size(); ++k)
        if (pmf[k] > 0.0) std::cout << "K+=" << k + 1 << "  " << pmf[k] << '\n';
    return 0;
}

int cmd_simstudy(const CommonArgs& args) {
    SimStudyConfig cfg = load_simstudy_config(args.config_path);
    if (args.seed_override) cfg.settings.seed = *args.seed_override;
    if (args.workers > 1) cfg.settings.workers = args.workers;
    ensure_directory(args.out_dir);
    auto results = run_simulation_study(cfg.design, cfg.cells, cfg.settings);
    write_simstudy_csv(results, args.out_dir + "/simstudy.csv");
    for (const auto& cell : results) {
        std::cout << cell.label << ": E[pp|y]=" << cell.mean_precision
                  << "  khat=" << cell.mean_khat << "  ari=" << cell.mean_ari
                  << "  err=" << cell.mean_err << "  (" << cell.n_ok << " ok)\n";
    }
    return 0;
}

int cmd_identify(const CommonArgs& args, const std::string& trace_dir, int khat) {
    RunConfig cfg = load_fit_config(args);
    Dataset data = resolve_dataset(cfg.data, cfg.add_intercept);
    ChainTrace trace = read_trace(trace_dir);
    int use_khat = khat;
    if (use_khat < 1) use_khat = kplus_posterior(trace).mode;
    auto kernel = make_kernel(cfg.spec.kernel, data);
    auto ident = identify(trace, use_khat, *kernel);
    ensure_directory(args.out_dir);
    write_identified(ident, args.out_dir);
    std::cout << "identified khat=" << ident.khat << "  draws used=" << ident.n_draws_used
              << "  discarded=" << ident.n_draws_discarded << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian clustering with sparse finite mixtures and Dirichlet process mixtures"};
    app.require_subcommand(1);

    CommonArgs args;
    int kmin_flag = 0, kmax_flag = 0;
    std::string trace_dir;
    int khat = 0;
    int pk_K = 10, pk_n = 100;
    double pk_e0 = 0.005;
    long pk_draws = 100000;
    std::uint64_t pk_seed = 20240801;

    auto add_common = [&](CLI::App* cmd, bool need_config) {
        auto* opt = cmd->add_option("--config", args.config_path, "JSON config file");
        if (need_config) opt->required()->check(CLI::ExistingFile);
        cmd->add_option("--data", args.data_override, "dataset path override");
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_option("--seed", args.seed_override, "seed override");
    };

    auto* fit = app.add_subcommand("fit", "run the Gibbs sampler and summarize K+");
    add_common(fit, true);
    fit->add_option("--chains", args.chains, "number of chains")->check(CLI::PositiveNumber);
    fit->add_option("--workers", args.workers, "worker threads")->check(CLI::PositiveNumber);

    auto* evidence = app.add_subcommand("evidence", "marginal likelihoods over a K range");
    add_common(evidence, true);
    evidence->add_option("--kmin", kmin_flag, "smallest K");
    evidence->add_option("--kmax", kmax_flag, "largest K");

    auto* prior = app.add_subcommand("prior-kplus", "Monte Carlo prior pmf of K+");
    prior->add_option("--k", pk_K, "number of components")->required();
    prior->add_option("--e0", pk_e0, "Dirichlet precision")->required();
    prior->add_option("--n", pk_n, "number of observations")->required();
    prior->add_option("--draws", pk_draws, "Monte Carlo draws");
    prior->add_option("--seed", pk_seed, "seed");
    prior->add_option("--out", args.out_dir, "output directory");

    auto* sim = app.add_subcommand("simstudy", "replicated simulation study");
    add_common(sim, true);
    sim->add_option("--workers", args.workers, "worker threads")->check(CLI::PositiveNumber);

    auto* ident = app.add_subcommand("identify", "re-identify a stored trace");
    add_common(ident, true);
    ident->add_option("--trace", trace_dir, "directory holding trace files")
        ->required()
        ->check(CLI::ExistingDirectory);
    ident->add_option("--khat", khat, "number of clusters (default: posterior mode)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUserError;
    }

    try {
        if (fit->parsed()) return cmd_fit(args);
        if (evidence->parsed()) return cmd_evidence(args, kmin_flag, kmax_flag);
        if (prior->parsed())
            return cmd_prior_kplus(pk_K, pk_e0, pk_n, pk_draws, pk_seed, args.out_dir);
        if (sim->parsed()) return cmd_simstudy(args);
        if (ident->parsed()) return cmd_identify(args, trace_dir, khat);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUserError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
    return 0;
}
