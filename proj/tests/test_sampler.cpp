#include <doctest.h>

#include <cmath>
#include <numeric>

#include "sparsemix/postprocess.hpp"
#include "sparsemix/special.hpp"
#include "support.hpp"

using namespace sparsemix;

namespace {

struct GewekeStats {
    std::vector<double> kplus, precision, ybar, yzero, hyper;

    void record(int kp, double prec, const std::vector<int>& y, double b0) {
        kplus.push_back(kp);
        precision.push_back(prec);
        double s = 0.0, z = 0.0;
        for (int v : y) {
            s += v;
            z += (v == 0);
        }
        ybar.push_back(s / y.size());
        yzero.push_back(z / y.size());
        if (!std::isnan(b0)) hyper.push_back(b0);
    }
};

void check_moments(const std::vector<double>& successive, const std::vector<double>& marginal,
                   const char* what) {
    const double m1 = testsupport::mean_of(successive);
    const double m2 = testsupport::mean_of(marginal);
    const double se1 = testsupport::batch_mean_se(successive, 50);
    const double se2 =
        std::sqrt(testsupport::variance_of(marginal) / marginal.size());
    const double se = std::sqrt(se1 * se1 + se2 * se2);
    INFO(what << ": successive " << m1 << " vs marginal " << m2 << " (se " << se << ")");
    CHECK(std::fabs(m1 - m2) <= 4.0 * se);
}

// Draw (eta, S) from the SFM prior via sticks + multinomial labels.
std::vector<int> prior_labels_sfm(double e0, int K, int n, RngStream& rng) {
    AllocationState empty;
    empty.n_obs = 0;
    empty.counts.assign(K, 0);
    auto w = sample_sticks_posterior(empty, Family::sfm, e0, K, rng);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = sample_categorical(w.weights, rng);
    return labels;
}

// CRP labels = exact DPM prior partition, canonical order.
std::vector<int> crp_labels(double alpha, int n, RngStream& rng) {
    std::vector<int> labels{0};
    std::vector<double> sizes{1.0};
    for (int i = 1; i < n; ++i) {
        std::vector<double> w = sizes;
        w.push_back(alpha);
        int pick = sample_categorical(w, rng);
        labels.push_back(pick);
        if (pick == static_cast<int>(sizes.size()))
            sizes.push_back(1.0);
        else
            sizes[pick] += 1.0;
    }
    return labels;
}

}  // namespace

TEST_CASE("geweke joint-distribution test, poisson kernel, sfm") {
    const int n = 8, K = 3, cycles = 40000, burn = 1000;
    KernelSpec kspec;
    kspec.type = KernelSpec::Type::poisson;
    kspec.poisson.a0 = 1.0;
    kspec.poisson.g0 = 3.0;
    kspec.poisson.G0 = 3.0;  // E[b0]=1, E[mu]=E[y]=1.5 with finite variance

    ModelSpec spec;
    spec.kernel = kspec;
    spec.family = Family::sfm;
    spec.K = K;
    spec.precision_prior.type = PrecisionPrior::Type::gamma;
    spec.precision_prior.gamma = {1.0, 2.0};

    // successive-conditional simulator: regenerate data, then sweep
    Dataset data{CountData{std::vector<int>(n, 1)}};
    auto kernel = make_kernel(kspec, data);
    RngStream rng(301, 0);
    ChainState state = initialize(spec, data, *kernel, 1, rng);
    GewekeStats succ;
    for (int c = 0; c < cycles + burn; ++c) {
        auto& y = data.counts();
        for (int i = 0; i < n; ++i) {
            double mu = std::get<PoissonParams>(state.thetas[state.alloc.labels[i]]).mu;
            y.y[i] = sample_poisson(mu, rng);
        }
        sweep(state, spec, *kernel, rng, false);
        if (c >= burn)
            succ.record(state.alloc.kplus(), state.precision.value, y.y,
                        kernel->shared_hyper());
    }

    // marginal-conditional simulator: iid draws from the joint prior
    GewekeStats marg;
    RngStream mrng(302, 0);
    for (int c = 0; c < cycles; ++c) {
        double e0 = sample_gamma(1.0, 2.0, mrng);
        double b0 = sample_gamma(3.0, 3.0, mrng);
        std::vector<double> mus(K);
        for (auto& m : mus) m = sample_gamma(1.0, b0, mrng);
        auto labels = prior_labels_sfm(e0, K, n, mrng);
        std::vector<int> y(n);
        for (int i = 0; i < n; ++i) y[i] = sample_poisson(mus[labels[i]], mrng);
        auto st = AllocationState::from_labels(labels, K);
        marg.record(st.kplus(), e0, y, b0);
    }

    check_moments(succ.kplus, marg.kplus, "K+");
    check_moments(succ.precision, marg.precision, "e0");
    check_moments(succ.ybar, marg.ybar, "mean y");
    check_moments(succ.yzero, marg.yzero, "P(y=0)");
    check_moments(succ.hyper, marg.hyper, "b0");
}

TEST_CASE("geweke joint-distribution test, categorical kernel, sfm") {
    const int n = 8, K = 3, cycles = 40000, burn = 1000;
    KernelSpec kspec;
    kspec.type = KernelSpec::Type::categorical;
    kspec.categorical.g0 = 1.0;

    ModelSpec spec;
    spec.kernel = kspec;
    spec.family = Family::sfm;
    spec.K = K;
    spec.precision_prior.type = PrecisionPrior::Type::gamma;
    spec.precision_prior.gamma = {1.0, 2.0};

    CategoricalData proto;
    proto.cardinalities = {2, 3};
    proto.feature_names = {"a", "b"};
    proto.codes.assign(n, {0, 0});
    Dataset data{std::move(proto)};
    auto kernel = make_kernel(kspec, data);

    auto cat_stat = [&](const CategoricalData& dd) {
        double f = 0.0;
        for (const auto& row : dd.codes) f += (row[1] == 2);
        return f / dd.codes.size();
    };

    RngStream rng(303, 0);
    ChainState state = initialize(spec, data, *kernel, 1, rng);
    std::vector<double> succ_kplus, succ_e0, succ_cat;
    for (int c = 0; c < cycles + burn; ++c) {
        auto& d = data.categorical();
        for (int i = 0; i < n; ++i) {
            const auto& p = std::get<CategoricalParams>(state.thetas[state.alloc.labels[i]]);
            for (int j = 0; j < 2; ++j) d.codes[i][j] = sample_categorical(p.probs[j], rng);
        }
        sweep(state, spec, *kernel, rng, false);
        if (c >= burn) {
            succ_kplus.push_back(state.alloc.kplus());
            succ_e0.push_back(state.precision.value);
            succ_cat.push_back(cat_stat(d));
        }
    }

    std::vector<double> marg_kplus, marg_e0, marg_cat;
    RngStream mrng(304, 0);
    for (int c = 0; c < cycles; ++c) {
        double e0 = sample_gamma(1.0, 2.0, mrng);
        auto labels = prior_labels_sfm(e0, K, n, mrng);
        std::vector<CategoricalParams> thetas(K);
        for (int k = 0; k < K; ++k) {
            thetas[k].probs = {sample_dirichlet({1.0, 1.0}, mrng),
                               sample_dirichlet({1.0, 1.0, 1.0}, mrng)};
        }
        CategoricalData d;
        d.cardinalities = {2, 3};
        for (int i = 0; i < n; ++i)
            d.codes.push_back({sample_categorical(thetas[labels[i]].probs[0], mrng),
                               sample_categorical(thetas[labels[i]].probs[1], mrng)});
        auto st = AllocationState::from_labels(labels, K);
        marg_kplus.push_back(st.kplus());
        marg_e0.push_back(e0);
        marg_cat.push_back(cat_stat(d));
    }

    check_moments(succ_kplus, marg_kplus, "K+");
    check_moments(succ_e0, marg_e0, "e0");
    check_moments(succ_cat, marg_cat, "P(feature b = 3)");
}

TEST_CASE("geweke joint-distribution test, dpm slice sampler") {
    // Validates the random-truncation slice machinery against exact CRP
    // prior simulation.
    const int n = 8, cycles = 40000, burn = 1000;
    KernelSpec kspec;
    kspec.type = KernelSpec::Type::poisson;
    kspec.poisson.a0 = 1.0;
    kspec.poisson.g0 = 3.0;
    kspec.poisson.G0 = 3.0;

    ModelSpec spec;
    spec.kernel = kspec;
    spec.family = Family::dpm;
    spec.precision_prior.type = PrecisionPrior::Type::gamma;
    spec.precision_prior.gamma = {2.0, 4.0};

    Dataset data{CountData{std::vector<int>(n, 1)}};
    auto kernel = make_kernel(kspec, data);
    RngStream rng(305, 0);
    ChainState state = initialize(spec, data, *kernel, 1, rng);
    GewekeStats succ;
    for (int c = 0; c < cycles + burn; ++c) {
        auto& y = data.counts();
        for (int i = 0; i < n; ++i) {
            double mu = std::get<PoissonParams>(state.thetas[state.alloc.labels[i]]).mu;
            y.y[i] = sample_poisson(mu, rng);
        }
        sweep(state, spec, *kernel, rng, false);
        if (c >= burn)
            succ.record(state.alloc.kplus(), state.precision.value, y.y,
                        kernel->shared_hyper());
    }

    GewekeStats marg;
    RngStream mrng(306, 0);
    for (int c = 0; c < cycles; ++c) {
        double alpha = sample_gamma(2.0, 4.0, mrng);
        double b0 = sample_gamma(3.0, 3.0, mrng);
        auto labels = crp_labels(alpha, n, mrng);
        int kp = 1 + *std::max_element(labels.begin(), labels.end());
        std::vector<double> mus(kp);
        for (auto& m : mus) m = sample_gamma(1.0, b0, mrng);
        std::vector<int> y(n);
        for (int i = 0; i < n; ++i) y[i] = sample_poisson(mus[labels[i]], mrng);
        marg.record(kp, alpha, y, b0);
    }

    check_moments(succ.kplus, marg.kplus, "K+");
    check_moments(succ.precision, marg.precision, "alpha");
    check_moments(succ.ybar, marg.ybar, "mean y");
    check_moments(succ.yzero, marg.yzero, "P(y=0)");
    check_moments(succ.hyper, marg.hyper, "b0");
}

TEST_CASE("precision MH satisfies detailed balance on a frozen partition") {
    // long MH run against 1-d quadrature of p(C|e0,K) p(e0)
    KernelSpec kspec;
    kspec.type = KernelSpec::Type::poisson;
    kspec.poisson.G0 = 1.0;
    Dataset data{CountData{{1, 2, 3, 4, 5}}};
    auto kernel = make_kernel(kspec, data);

    ModelSpec spec;
    spec.kernel = kspec;
    spec.family = Family::sfm;
    spec.K = 3;
    spec.precision_prior.type = PrecisionPrior::Type::gamma;
    spec.precision_prior.gamma = {1.0, 2.0};

    ChainState state;
    state.alloc = AllocationState::from_labels({0, 0, 1, 2, 2}, 3);
    state.precision.value = 0.5;

    RngStream rng(307, 0);
    const int steps = 400000;
    std::vector<double> draws;
    draws.reserve(steps / 5);
    for (int s = 0; s < steps; ++s) {
        mh_precision(state, spec, *kernel, rng, s < 5000);
        if (s >= 5000 && s % 5 == 0) draws.push_back(std::log(state.precision.value));
    }
    auto ref = testsupport::quadrature_cdf_log(
        [&](double e0) {
            return log_prior_partition_sfm(state.alloc, e0, 3) + std::log(2.0) - 2.0 * e0;
        },
        1e-7, 60.0, 40001);
    CHECK(testsupport::ks_distance(draws, ref) < 0.02);
}

TEST_CASE("precision MH respects a uniform support and a fixed value") {
    KernelSpec kspec;
    kspec.type = KernelSpec::Type::categorical;
    auto data = load_fear();
    auto kernel = make_kernel(kspec, data);  // param_dim = 7 -> d/2 = 3.5

    ModelSpec spec;
    spec.kernel = kspec;
    spec.family = Family::sfm;
    spec.K = 4;
    ChainState state;
    state.alloc = AllocationState::from_labels({0, 0, 1, 1, 2, 2, 3, 3}, 4);

    SUBCASE("fixed precision never moves") {
        spec.precision_prior.type = PrecisionPrior::Type::fixed;
        spec.precision_prior.value = 4.0;
        state.precision.value = 4.0;
        RngStream rng(308, 0);
        for (int s = 0; s < 1000; ++s) mh_precision(state, spec, *kernel, rng);
        CHECK(state.precision.value == 4.0);
        CHECK(state.precision.attempt_count == 0);
    }
    SUBCASE("uniform prior rejects proposals beyond d/2") {
        spec.precision_prior.type = PrecisionPrior::Type::uniform;
        state.precision.value = 1.0;
        RngStream rng(309, 0);
        double max_seen = 0.0;
        for (int s = 0; s < 200000; ++s) {
            mh_precision(state, spec, *kernel, rng, s < 2000);
            max_seen = std::max(max_seen, state.precision.value);
        }
        CHECK(max_seen <= 3.5);
        CHECK(max_seen > 2.0);  // the chain does explore the whole support
    }
}

TEST_CASE("prior-only runs reproduce the new-cluster laws") {
    KernelSpec kspec;
    kspec.type = KernelSpec::Type::poisson;
    kspec.poisson.G0 = 1.0;
    Dataset data{CountData{std::vector<int>(10, 1)}};

    SUBCASE("sfm urn law") {
        ModelSpec spec;
        spec.kernel = kspec;
        spec.family = Family::sfm;
        spec.K = 5;
        spec.precision_prior.type = PrecisionPrior::Type::fixed;
        spec.precision_prior.value = 0.8;
        spec.likelihood_off = true;
        auto kernel = make_kernel(kspec, data);
        RngStream rng(310, 0);
        ChainState state = initialize(spec, data, *kernel, 1, rng);
        state.precision.value = 0.8;
        const int n = 10, K = 5;
        const int sweeps = 40000, burn = 500;
        std::vector<double> diff;  // singleton frequency minus urn formula
        for (int s = 0; s < sweeps + burn; ++s) {
            sweep(state, spec, *kernel, rng, false);
            if (s < burn) continue;
            double singleton = 0.0, formula = 0.0;
            int kp = state.alloc.kplus();
            for (int i = 0; i < n; ++i) {
                bool is_singleton = state.alloc.counts[state.alloc.labels[i]] == 1;
                singleton += is_singleton;
                int kp_minus = kp - (is_singleton ? 1 : 0);
                formula += prob_new_cluster_sfm(n, 0.8, K, std::max(1, kp_minus));
            }
            diff.push_back((singleton - formula) / n);
        }
        const double md = testsupport::mean_of(diff);
        const double se = testsupport::batch_mean_se(diff, 50);
        INFO("singleton-frequency gap " << md << " se " << se);
        CHECK(std::fabs(md) <= 3.0 * se);
    }

    SUBCASE("dpm law") {
        ModelSpec spec;
        spec.kernel = kspec;
        spec.family = Family::dpm;
        spec.precision_prior.type = PrecisionPrior::Type::fixed;
        spec.precision_prior.value = 0.8;
        spec.likelihood_off = true;
        auto kernel = make_kernel(kspec, data);
        RngStream rng(311, 0);
        ChainState state = initialize(spec, data, *kernel, 1, rng);
        state.precision.value = 0.8;
        const int n = 10;
        const double expected = prob_new_cluster_dpm(n, 0.8);
        const int sweeps = 40000, burn = 500;
        std::vector<double> freq;
        for (int s = 0; s < sweeps + burn; ++s) {
            sweep(state, spec, *kernel, rng, false);
            if (s < burn) continue;
            double singleton = 0.0;
            for (int i = 0; i < n; ++i)
                singleton += state.alloc.counts[state.alloc.labels[i]] == 1;
            freq.push_back(singleton / n);
        }
        const double m = testsupport::mean_of(freq);
        const double se = testsupport::batch_mean_se(freq, 50);
        INFO("singleton frequency " << m << " expected " << expected << " se " << se);
        CHECK(std::fabs(m - expected) <= 3.0 * se);
    }
}

TEST_CASE("run_chain basics: determinism, degeneracy, invariants") {
    KernelSpec kspec;
    kspec.type = KernelSpec::Type::categorical;
    auto data = load_fear();

    ModelSpec spec;
    spec.kernel = kspec;
    spec.family = Family::sfm;
    spec.K = 4;
    spec.precision_prior.type = PrecisionPrior::Type::gamma;
    spec.precision_prior.gamma = {1.0, 20.0};

    RunSettings rs;
    rs.burnin = 200;
    rs.keep = 100;
    rs.seed = 99;

    SUBCASE("same seed twice gives bit-identical traces") {
        auto t1 = run_chain(spec, data, rs);
        auto t2 = run_chain(spec, data, rs);
        REQUIRE(t1.sweeps.size() == t2.sweeps.size());
        for (std::size_t s = 0; s < t1.sweeps.size(); ++s) {
            CHECK(t1.sweeps[s].kplus == t2.sweeps[s].kplus);
            CHECK(t1.sweeps[s].precision == t2.sweeps[s].precision);
            CHECK(t1.sweeps[s].loglik == t2.sweeps[s].loglik);
            CHECK(t1.sweeps[s].allocations == t2.sweeps[s].allocations);
        }
        auto t3 = run_chain(spec, data, {200, 100, 1, 100, 0, false, true});
        bool different = false;
        for (std::size_t s = 0; s < t1.sweeps.size(); ++s)
            different = different || t1.sweeps[s].precision != t3.sweeps[s].precision;
        CHECK(different);
    }

    SUBCASE("K=1 stays a single conjugate component") {
        spec.K = 1;
        auto t = run_chain(spec, data, rs);
        for (const auto& s : t.sweeps) CHECK(s.kplus == 1);
    }

    SUBCASE("n_keep=1 single-row trace and count consistency") {
        rs.keep = 1;
        auto t = run_chain(spec, data, rs);
        CHECK(t.sweeps.size() == 1);
        CHECK(t.sweeps[0].allocations.size() == 93);
    }
}

TEST_CASE("dpm chain keeps residual weight below every slice variable") {
    KernelSpec kspec;
    kspec.type = KernelSpec::Type::poisson;
    Dataset data{CountData{{0, 1, 0, 2, 14, 17, 20, 1, 0, 2}}};

    ModelSpec spec;
    spec.kernel = kspec;
    spec.family = Family::dpm;
    spec.precision_prior.type = PrecisionPrior::Type::gamma;
    spec.precision_prior.gamma = {2.0, 4.0};

    auto kernel = make_kernel(kspec, data);
    RngStream rng(313, 0);
    ChainState state = initialize(spec, data, *kernel, 3, rng);
    for (int s = 0; s < 3000; ++s) {
        sweep(state, spec, *kernel, rng, s < 500);
        int total = 0;
        for (int c : state.alloc.counts) total += c;
        CHECK(total == 10);
        state.alloc.check_consistent();
        CHECK(std::isfinite(state.precision.value));
    }
}

TEST_CASE("initial classification shapes") {
    RngStream rng(314, 0);
    auto fear = load_fear();
    auto labels = initial_classification(fear, 10, rng);
    auto st = AllocationState::from_labels(labels, 10);
    CHECK(st.kplus() == 10);  // all ten components occupied at the start

    auto one = initial_classification(fear, 1, rng);
    for (int lab : one) CHECK(lab == 0);

    Dataset counts{CountData{{5, 1, 9, 2, 8, 3}}};
    auto bins = initial_classification(counts, 3, rng);
    auto stc = AllocationState::from_labels(bins, 3);
    CHECK(stc.kplus() == 3);
    CHECK_THROWS_AS(initial_classification(counts, 0, rng), std::domain_error);
    CHECK_THROWS_AS(initial_classification(counts, 7, rng), std::domain_error);
}

TEST_CASE("poisson glm mixture recovers two regression regimes") {
    RngStream data_rng(601, 0);
    const int n = 150;
    RegressionData reg;
    reg.covariate_names = {"const", "z"};
    std::vector<int> truth(n);
    for (int i = 0; i < n; ++i) {
        double z = sample_uniform(-1.0, 1.0, data_rng);
        truth[i] = static_cast<int>(data_rng.next_u64() % 2);
        double lam = truth[i] == 0 ? std::exp(0.2 + 1.5 * z) : std::exp(2.2 - 1.0 * z);
        reg.y.push_back(sample_poisson(lam, data_rng));
        reg.x.push_back({1.0, z});
    }
    Dataset data{std::move(reg)};

    ModelSpec spec;
    spec.kernel.type = KernelSpec::Type::poisson_glm;
    spec.family = Family::sfm;
    spec.K = 6;
    spec.precision_prior.type = PrecisionPrior::Type::gamma;
    spec.precision_prior.gamma = {1.0, 120.0};

    RunSettings rs;
    rs.burnin = 2500;
    rs.keep = 4000;
    rs.seed = 602;
    auto trace = run_chain(spec, data, rs);
    auto post = kplus_posterior(trace);
    CHECK(post.mode == 2);

    auto kernel = make_kernel(spec.kernel, data);
    auto ident = identify(trace, 2, *kernel);
    CHECK(adjusted_rand_index(ident.final_partition, truth) > 0.5);
    // match identified components to the generating regimes by slope sign
    int pos = ident.components[0].mean[1] > ident.components[1].mean[1] ? 0 : 1;
    CHECK(std::fabs(ident.components[pos].mean[0] - 0.2) < 0.5);
    CHECK(std::fabs(ident.components[pos].mean[1] - 1.5) < 0.5);
    CHECK(std::fabs(ident.components[1 - pos].mean[0] - 2.2) < 0.5);
    CHECK(std::fabs(ident.components[1 - pos].mean[1] + 1.0) < 0.5);
}

TEST_CASE("negbin glm mixture decides for homogeneity on one-regime data") {
    RngStream data_rng(603, 0);
    const int n = 120;
    RegressionData reg;
    reg.covariate_names = {"const"};
    for (int i = 0; i < n; ++i) {
        double lam = sample_gamma(5.0, 5.0 / std::exp(1.2), data_rng);  // NB via gamma mixing
        reg.y.push_back(sample_poisson(lam, data_rng));
        reg.x.push_back({1.0});
    }
    Dataset data{std::move(reg)};

    ModelSpec spec;
    spec.kernel.type = KernelSpec::Type::negbin_glm;
    spec.family = Family::sfm;
    spec.K = 5;
    spec.precision_prior.type = PrecisionPrior::Type::gamma;
    spec.precision_prior.gamma = {1.0, 100.0};

    RunSettings rs;
    rs.burnin = 2000;
    rs.keep = 3000;
    rs.seed = 604;
    auto trace = run_chain(spec, data, rs);
    CHECK(kplus_posterior(trace).mode == 1);
}

TEST_CASE("matched priors across families") {
    auto dpm = match_prior(MatchDirection::sfm_to_dpm, {1.0, 200.0}, 10);
    CHECK(dpm.a == 1.0);
    CHECK(dpm.b == doctest::Approx(20.0));
    auto dpm20 = match_prior(MatchDirection::sfm_to_dpm, {1.0, 200.0}, 20);
    CHECK(dpm20.b == doctest::Approx(10.0));
    auto back = match_prior(MatchDirection::dpm_to_sfm, dpm20, 20);
    CHECK(back.b == doctest::Approx(200.0));
    auto sfm = match_prior(MatchDirection::dpm_to_sfm, {2.0, 4.0}, 10);
    CHECK(sfm.a == 2.0);
    CHECK(sfm.b == doctest::Approx(40.0));
    CHECK_THROWS_AS(match_prior(MatchDirection::sfm_to_dpm, {0.0, 1.0}, 10),
                    std::invalid_argument);
}
