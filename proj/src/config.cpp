#include "sparsemix/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sparsemix {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

KernelSpec parse_kernel(const json& j) {
    KernelSpec spec;
    const std::string type = j.at("type").get<std::string>();
    if (type == "categorical") {
        spec.type = KernelSpec::Type::categorical;
        spec.categorical.g0 = j.value("g0", 1.0);
    } else if (type == "poisson") {
        spec.type = KernelSpec::Type::poisson;
        spec.poisson.a0 = j.value("a0", 0.1);
        spec.poisson.g0 = j.value("g0", 0.5);
        if (j.contains("G0")) spec.poisson.G0 = j.at("G0").get<double>();
        if (j.contains("fixed_b0")) spec.poisson.fixed_b0 = j.at("fixed_b0").get<double>();
    } else if (type == "poisson_glm" || type == "negbin_glm") {
        spec.type = type == "poisson_glm" ? KernelSpec::Type::poisson_glm
                                          : KernelSpec::Type::negbin_glm;
        spec.glm.coef_sd = j.value("coef_sd", 2.0);
        if (j.contains("rho_c")) spec.glm.rho_c = j.at("rho_c").get<double>();
    } else {
        throw std::invalid_argument("unknown kernel type: " + type);
    }
    return spec;
}

Family parse_family(const json& j) {
    const std::string fam = j.value("family", "sfm");
    if (fam == "sfm") return Family::sfm;
    if (fam == "dpm") return Family::dpm;
    throw std::invalid_argument("unknown family: " + fam);
}

void parse_precision_prior(const json& j, ModelSpec& spec) {
    if (!j.contains("precision_prior")) return;
    const json& p = j.at("precision_prior");
    const std::string type = p.at("type").get<std::string>();
    auto& prior = spec.precision_prior;
    if (type == "gamma") {
        prior.type = PrecisionPrior::Type::gamma;
        GammaPrior g{p.at("a").get<double>(), p.at("b").get<double>()};
        if (p.contains("matched_from")) {
            const std::string src = p.at("matched_from").get<std::string>();
            MatchRecord rec;
            rec.source = g;
            if (src == "dpm") {
                if (spec.family != Family::sfm)
                    throw std::invalid_argument("matched_from dpm requires an SFM model");
                rec.source_family = Family::dpm;
                rec.K = spec.K;
                g = match_prior(MatchDirection::dpm_to_sfm, g, spec.K);
            } else if (src == "sfm") {
                if (spec.family != Family::dpm)
                    throw std::invalid_argument("matched_from sfm requires a DPM model");
                rec.source_family = Family::sfm;
                rec.K = p.value("matched_K", 10);
                g = match_prior(MatchDirection::sfm_to_dpm, g, rec.K);
            } else {
                throw std::invalid_argument("matched_from must be 'sfm' or 'dpm'");
            }
            spec.matched_from = rec;
        }
        prior.gamma = g;
    } else if (type == "uniform") {
        prior.type = PrecisionPrior::Type::uniform;
        prior.upper = p.value("upper", 0.0);  // 0: derive d/2 from the kernel
    } else if (type == "fixed") {
        prior.type = PrecisionPrior::Type::fixed;
        prior.value = p.at("value").get<double>();
        if (!(prior.value > 0.0))
            throw std::invalid_argument("fixed precision must be positive");
    } else {
        throw std::invalid_argument("unknown precision prior type: " + type);
    }
}

ModelSpec parse_model(const json& j) {
    ModelSpec spec;
    spec.kernel = parse_kernel(j.at("kernel"));
    spec.family = parse_family(j);
    spec.K = j.value("K", 10);
    parse_precision_prior(j, spec);
    spec.kappa = j.value("kappa", 0.8);
    spec.init_k = j.value("init_k", 0);
    return spec;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    try {
        cfg.spec = parse_model(j);
        cfg.data = j.value("data", std::string("builtin:fear"));
        cfg.add_intercept = j.value("add_intercept", true);
        cfg.settings.burnin = j.value("burnin", 8000);
        cfg.settings.keep = j.value("keep", 8000);
        cfg.settings.thin = j.value("thin", 1);
        cfg.settings.seed = j.value("seed", static_cast<std::uint64_t>(20240801));
        cfg.settings.record_all_components = j.value("record_all_components", false);
        cfg.settings.store_allocations = j.value("store_allocations", true);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config: ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(read_file(path));
}

EvidenceConfig parse_evidence_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    EvidenceConfig cfg;
    try {
        cfg.kernel = parse_kernel(j.at("kernel"));
        cfg.data = j.value("data", std::string("builtin:fear"));
        cfg.add_intercept = j.value("add_intercept", true);
        cfg.e0 = j.value("e0", 4.0);
        cfg.kmin = j.value("kmin", 1);
        cfg.kmax = j.value("kmax", 5);
        cfg.method = j.value("method", std::string("auto"));
        cfg.burnin = j.value("burnin", 2000);
        cfg.keep = j.value("keep", 4000);
        cfg.seed = j.value("seed", static_cast<std::uint64_t>(20240801));
        if (j.contains("bridge")) {
            const json& b = j.at("bridge");
            cfg.bridge.s0 = b.value("s0", 100);
            cfg.bridge.m_posterior = b.value("m_posterior", 2000);
            cfg.bridge.m_q = b.value("m_q", 2000);
            cfg.bridge.batches = b.value("batches", 20);
        }
        cfg.bridge.seed = cfg.seed + 1;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad evidence config: ") + e.what());
    }
    if (!(cfg.e0 > 0.0)) throw std::invalid_argument("evidence config: e0 must be positive");
    if (cfg.kmin < 1 || cfg.kmax < cfg.kmin)
        throw std::invalid_argument("evidence config: need 1 <= kmin <= kmax");
    return cfg;
}

EvidenceConfig load_evidence_config(const std::string& path) {
    return parse_evidence_config(read_file(path));
}

SimStudyConfig parse_simstudy_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    SimStudyConfig cfg;
    try {
        if (j.contains("design")) {
            const json& d = j.at("design");
            cfg.design.n_obs = d.value("n_obs", 100);
            if (d.contains("class_weights"))
                cfg.design.class_weights = d.at("class_weights").get<std::vector<double>>();
            if (d.contains("occurrence"))
                cfg.design.occurrence =
                    d.at("occurrence").get<std::vector<std::vector<std::vector<double>>>>();
        }
        cfg.settings.n_replications = j.value("replications", 20);
        cfg.settings.burnin = j.value("burnin", 8000);
        cfg.settings.keep = j.value("keep", 8000);
        cfg.settings.thin = j.value("thin", 1);
        cfg.settings.seed = j.value("seed", static_cast<std::uint64_t>(20240801));
        cfg.settings.workers = j.value("workers", 1);
        for (const json& c : j.at("cells")) {
            SimCell cell;
            cell.label = c.at("label").get<std::string>();
            cell.spec = parse_model(c);
            cfg.cells.push_back(std::move(cell));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad simstudy config: ") + e.what());
    }
    return cfg;
}

SimStudyConfig load_simstudy_config(const std::string& path) {
    return parse_simstudy_config(read_file(path));
}

Dataset resolve_dataset(const std::string& name, bool add_intercept) {
    if (name == "builtin:fear") return load_fear();
    if (name.rfind("builtin:", 0) == 0)
        throw std::invalid_argument("unknown builtin dataset: " + name);
    return load_csv(name, add_intercept);
}

}  // namespace sparsemix
