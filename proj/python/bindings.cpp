#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <numeric>

#include "sparsemix/config.hpp"
#include "sparsemix/evidence.hpp"
#include "sparsemix/postprocess.hpp"
#include "sparsemix/special.hpp"
#include "sparsemix/trace_io.hpp"

namespace py = pybind11;
using namespace sparsemix;

namespace {

Family parse_family_name(const std::string& name) {
    if (name == "sfm") return Family::sfm;
    if (name == "dpm") return Family::dpm;
    throw std::invalid_argument("family must be 'sfm' or 'dpm'");
}

py::dict dataset_to_dict(const Dataset& data) {
    py::dict out;
    if (const auto* cat = std::get_if<CategoricalData>(&data.value)) {
        py::list rows;
        for (const auto& row : cat->codes) {
            py::list r;
            for (int code : row) r.append(code + 1);  // 1-based codes, as in the CSV schema
            rows.append(r);
        }
        out["type"] = "categorical";
        out["codes"] = rows;
        out["cardinalities"] = cat->cardinalities;
        out["feature_names"] = cat->feature_names;
    } else if (const auto* cnt = std::get_if<CountData>(&data.value)) {
        out["type"] = "counts";
        out["y"] = cnt->y;
    } else {
        const auto& reg = data.regression();
        out["type"] = "regression";
        out["y"] = reg.y;
        out["x"] = reg.x;
        out["covariate_names"] = reg.covariate_names;
    }
    return out;
}

py::dict fit_from_json(const std::string& config_json, const std::string& out_dir) {
    RunConfig cfg = parse_run_config(config_json);
    Dataset data = resolve_dataset(cfg.data, cfg.add_intercept);
    auto trace = run_chain(cfg.spec, data, cfg.settings);
    auto post = kplus_posterior(trace);

    py::dict out;
    out["kplus_mode"] = post.mode;
    py::dict pmf;
    for (const auto& [k, p] : post.pmf) pmf[py::int_(k)] = p;
    out["kplus_pmf"] = pmf;
    auto prec = trace.precision_column();
    out["precision_mean"] =
        std::accumulate(prec.begin(), prec.end(), 0.0) / prec.size();
    out["n_sweeps"] = static_cast<int>(trace.sweeps.size());

    auto kernel = make_kernel(cfg.spec.kernel, data);
    try {
        auto ident = identify(trace, post.mode, *kernel);
        py::list partition;
        for (int lab : ident.final_partition) partition.append(lab + 1);
        out["final_partition"] = partition;
        py::list comps;
        for (const auto& c : ident.components) {
            py::dict jc;
            jc["weight_mean"] = c.weight_mean;
            jc["theta_mean"] = c.mean;
            jc["theta_hpd_low"] = c.hpd_low;
            jc["theta_hpd_high"] = c.hpd_high;
            comps.append(jc);
        }
        out["components"] = comps;
        out["theta_names"] = trace.theta_names;
    } catch (const std::exception& e) {
        out["identification_error"] = std::string(e.what());
    }
    if (!out_dir.empty()) {
        write_trace(trace, out_dir);
        write_kplus_posterior(post, out_dir + "/kplus_posterior.json");
    }
    return out;
}

py::list evidence_from_json(const std::string& config_json) {
    EvidenceConfig cfg = parse_evidence_config(config_json);
    Dataset data = resolve_dataset(cfg.data, cfg.add_intercept);
    KernelSpec kspec = cfg.kernel;
    if (kspec.type == KernelSpec::Type::poisson && !kspec.poisson.fixed_b0) {
        auto probe = make_kernel(kspec, data);
        kspec.poisson.fixed_b0 = probe->shared_hyper();
    }
    py::list rows;
    for (int K = cfg.kmin; K <= cfg.kmax; ++K) {
        py::dict row;
        row["K"] = K;
        try {
            auto kernel = make_kernel(kspec, data);
            EvidenceEstimate est;
            if (K == 1 && cfg.method != "enumeration") {
                est = log_evidence_k1(*kernel);
            } else if (cfg.method == "enumeration" ||
                       (cfg.method == "auto" &&
                        std::pow(static_cast<double>(K), data.n_obs()) <= 1e6)) {
                est = log_evidence_enumeration(*kernel, K, cfg.e0);
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
                auto trace = run_chain(spec, data, rs);
                BridgeOptions opts = cfg.bridge;
                opts.seed = cfg.seed + K;
                est = log_evidence_bridge(*kernel, K, cfg.e0, trace, opts);
            }
            row["method"] = evidence_method_name(est.method);
            row["log_evidence"] = est.log_value;
            row["std_error"] = est.std_error;
        } catch (const UnsupportedEvidence& e) {
            row["method"] = "unsupported";
            row["note"] = std::string(e.what());
        }
        rows.append(row);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sparse finite mixture and Dirichlet process mixture clustering engine";

    m.def("log_gamma_stable", &log_gamma_stable, py::arg("x"),
          "ln Gamma(x) for x > 0, stable near zero");

    m.def("sticks_to_weights", &sticks_to_weights, py::arg("sticks"),
          "Stick-breaking weights eta_k = nu_k * prod_{j<k}(1 - nu_j)");

    m.def(
        "slice_thresholds",
        [](const std::string& family, double kappa, int count) {
            return slice_thresholds(parse_family_name(family), kappa, count);
        },
        py::arg("family"), py::arg("kappa"), py::arg("count"));

    m.def(
        "log_prior_partition_sfm",
        [](const std::vector<int>& counts, int n_obs, double e0, int K) {
            return log_prior_partition_sfm_counts(counts, n_obs, e0, K);
        },
        py::arg("counts"), py::arg("n_obs"), py::arg("e0"), py::arg("K"),
        "Log partition prior of a sparse finite mixture from occupancy counts");

    m.def(
        "log_prior_partition_dpm",
        [](const std::vector<int>& counts, int n_obs, double alpha) {
            return log_prior_partition_dpm_counts(counts, n_obs, alpha);
        },
        py::arg("counts"), py::arg("n_obs"), py::arg("alpha"));

    m.def("prob_new_cluster_sfm", &prob_new_cluster_sfm, py::arg("n"), py::arg("e0"),
          py::arg("K"), py::arg("kplus_minus"));
    m.def("prob_new_cluster_dpm", &prob_new_cluster_dpm, py::arg("n"), py::arg("alpha"));

    m.def(
        "prior_kplus",
        [](int K, double e0, int n, int draws, std::uint64_t seed) {
            RngStream rng(seed, 0);
            return prior_kplus_pmf(K, e0, n, draws, rng);
        },
        py::arg("K"), py::arg("e0"), py::arg("n"), py::arg("draws") = 100000,
        py::arg("seed") = 0, "Monte Carlo prior pmf of the number of data clusters");

    m.def(
        "match_prior",
        [](const std::string& direction, double a, double b, int K) {
            MatchDirection dir;
            if (direction == "sfm_to_dpm")
                dir = MatchDirection::sfm_to_dpm;
            else if (direction == "dpm_to_sfm")
                dir = MatchDirection::dpm_to_sfm;
            else
                throw std::invalid_argument("direction must be sfm_to_dpm or dpm_to_sfm");
            auto g = match_prior(dir, {a, b}, K);
            return py::make_tuple(g.a, g.b);
        },
        py::arg("direction"), py::arg("a"), py::arg("b"), py::arg("K"));

    m.def("adjusted_rand_index", &adjusted_rand_index, py::arg("a"), py::arg("b"));
    m.def("error_rate", &error_rate, py::arg("predicted"), py::arg("truth"));

    m.def(
        "load_fear", []() { return dataset_to_dict(load_fear()); },
        "Embedded infant-temperament data (93 rows, 1-based codes)");

    m.def(
        "simulate_lca",
        [](int n_obs, std::uint64_t seed) {
            LcaDesign design;
            design.n_obs = n_obs;
            RngStream rng(seed, 0);
            auto [data, truth] = simulate_lca(design, rng);
            py::list labels;
            for (int lab : truth) labels.append(lab + 1);
            return py::make_tuple(dataset_to_dict(data), labels);
        },
        py::arg("n_obs") = 100, py::arg("seed") = 0,
        "Two-class latent class data with the default design; returns (data, labels)");

    m.def("fit", &fit_from_json, py::arg("config_json"), py::arg("out_dir") = std::string(),
          "Run the Gibbs sampler from a JSON config string; returns posterior summaries");

    m.def("evidence_table", &evidence_from_json, py::arg("config_json"),
          "Marginal likelihoods over the config's K range");
}
