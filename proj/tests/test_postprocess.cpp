#include <doctest.h>

#include <cmath>

#include "sparsemix/postprocess.hpp"
#include "support.hpp"

using namespace sparsemix;

namespace {

ChainTrace tiny_trace(const std::vector<int>& kplus) {
    ChainTrace t;
    t.n_obs = 4;
    t.theta_dim = 1;
    t.theta_names = {"mu"};
    for (std::size_t s = 0; s < kplus.size(); ++s) {
        SweepRecord rec;
        rec.sweep = static_cast<long>(s);
        rec.kplus = kplus[s];
        t.sweeps.push_back(rec);
    }
    return t;
}

}  // namespace

TEST_CASE("kplus posterior pmf and mode") {
    auto post = kplus_posterior(tiny_trace({2, 2, 3}));
    CHECK(post.pmf.at(2) == doctest::Approx(2.0 / 3.0));
    CHECK(post.pmf.at(3) == doctest::Approx(1.0 / 3.0));
    CHECK(post.mode == 2);

    auto constant = kplus_posterior(tiny_trace({4, 4, 4, 4}));
    CHECK(constant.pmf.at(4) == doctest::Approx(1.0));
    CHECK(constant.mode == 4);

    // tie breaks toward the smaller cluster count
    auto tie = kplus_posterior(tiny_trace({3, 2, 2, 3}));
    CHECK(tie.mode == 2);

    double total = 0.0;
    for (const auto& [k, p] : tie.pmf) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(kplus_posterior(ChainTrace{}), std::invalid_argument);
}

TEST_CASE("adjusted rand index closed-form cases") {
    CHECK(adjusted_rand_index({1, 1, 2, 2}, {1, 1, 2, 2}) == doctest::Approx(1.0));
    CHECK(adjusted_rand_index({1, 1, 2, 2}, {2, 2, 1, 1}) == doctest::Approx(1.0));
    // 2x2 contingency with every cell equal to 1 (Hubert-Arabie form)
    CHECK(adjusted_rand_index({1, 1, 2, 2}, {1, 2, 1, 2}) == doctest::Approx(-0.5));
    // one-cluster prediction scores zero
    CHECK(adjusted_rand_index({1, 1, 1, 1}, {1, 1, 2, 2}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(adjusted_rand_index({1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("adjusted rand index is symmetric, relabel-invariant and centered") {
    RngStream rng(401, 0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<int> a(30), b(30);
        for (int i = 0; i < 30; ++i) {
            a[i] = static_cast<int>(rng.next_u64() % 3);
            b[i] = static_cast<int>(rng.next_u64() % 4);
        }
        CHECK(adjusted_rand_index(a, b) == doctest::Approx(adjusted_rand_index(b, a)));
        std::vector<int> a_relab(a);
        for (auto& x : a_relab) x = (x + 7) * 3;  // injective relabeling
        CHECK(adjusted_rand_index(a_relab, b) == doctest::Approx(adjusted_rand_index(a, b)));
    }

    // near-zero expectation under independent random labelings
    double mean = 0.0;
    const int reps = 3000;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<int> a(60), b(60);
        for (int i = 0; i < 60; ++i) {
            a[i] = static_cast<int>(rng.next_u64() % 3);
            b[i] = static_cast<int>(rng.next_u64() % 3);
        }
        mean += adjusted_rand_index(a, b);
    }
    CHECK(std::fabs(mean / reps) < 0.01);
}

TEST_CASE("error rate via optimal assignment") {
    CHECK(error_rate({1, 1, 2, 2}, {1, 1, 2, 2}) == doctest::Approx(0.0));
    CHECK(error_rate({2, 2, 1, 1}, {1, 1, 2, 2}) == doctest::Approx(0.0));
    std::vector<int> pred(10, 1), truth(10, 1);
    pred[3] = 2;
    truth[7] = 2;  // one flipped point after the best matching
    CHECK(error_rate(pred, truth) == doctest::Approx(0.2));
    pred = truth;
    pred[0] = 2;
    CHECK(error_rate(pred, truth) == doctest::Approx(0.1));
    // differing label-set sizes
    CHECK(error_rate({1, 1, 1, 1}, {1, 1, 2, 3}) == doctest::Approx(0.5));

    // brute-force cross-check on random partitions with small label sets
    RngStream rng(402, 0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<int> a(12), b(12);
        for (int i = 0; i < 12; ++i) {
            a[i] = static_cast<int>(rng.next_u64() % 3);
            b[i] = static_cast<int>(rng.next_u64() % 3);
        }
        // brute force over the 3! bijections
        std::vector<int> perm{0, 1, 2};
        int best = 12;
        do {
            int wrong = 0;
            for (int i = 0; i < 12; ++i) wrong += (perm[a[i]] != b[i]);
            best = std::min(best, wrong);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(error_rate(a, b) == doctest::Approx(best / 12.0));
    }
}

TEST_CASE("hpd interval covers the requested mass tightly") {
    RngStream rng(403, 0);
    std::vector<double> draws(50000);
    for (auto& d : draws) d = sample_normal(rng);
    auto [lo, hi] = hpd_interval(draws, 0.95);
    CHECK(lo == doctest::Approx(-1.96).epsilon(0.04));
    CHECK(hi == doctest::Approx(1.96).epsilon(0.04));

    // skewed density: HPD must be shorter than the equal-tail interval
    for (auto& d : draws) d = sample_gamma(2.0, 1.0, rng);
    auto [glo, ghi] = hpd_interval(draws, 0.95);
    std::sort(draws.begin(), draws.end());
    double eq_lo = draws[static_cast<std::size_t>(0.025 * draws.size())];
    double eq_hi = draws[static_cast<std::size_t>(0.975 * draws.size())];
    CHECK(ghi - glo < eq_hi - eq_lo);
    CHECK(glo < 0.3);  // mode of G(2,1) is 1; the interval hugs the left side
}

TEST_CASE("kmeans recovers separated blobs") {
    RngStream rng(404, 0);
    std::vector<std::vector<double>> points;
    std::vector<int> truth;
    for (int i = 0; i < 60; ++i) {
        int c = i % 3;
        truth.push_back(c);
        points.push_back({c * 10.0 + 0.1 * sample_normal(rng), 0.1 * sample_normal(rng)});
    }
    auto assign = kmeans_assign(points, 3, 10, rng);
    CHECK(adjusted_rand_index(assign, truth) == doctest::Approx(1.0));
}

TEST_CASE("identify on a synthetic two-component poisson mixture") {
    // mu = 1 vs mu = 20, N = 200: the identified partition must match the
    // simulation truth almost perfectly and discard next to nothing.
    RngStream data_rng(405, 0);
    const int n = 200;
    CountData counts;
    std::vector<int> truth(n);
    for (int i = 0; i < n; ++i) {
        truth[i] = static_cast<int>(data_rng.next_u64() % 2);
        counts.y.push_back(sample_poisson(truth[i] == 0 ? 1.0 : 20.0, data_rng));
    }
    Dataset data{std::move(counts)};

    KernelSpec kspec;
    kspec.type = KernelSpec::Type::poisson;
    ModelSpec spec;
    spec.kernel = kspec;
    spec.family = Family::sfm;
    spec.K = 6;
    spec.precision_prior.type = PrecisionPrior::Type::gamma;
    spec.precision_prior.gamma = {1.0, 120.0};

    RunSettings rs;
    rs.burnin = 1500;
    rs.keep = 2500;
    rs.seed = 406;
    auto trace = run_chain(spec, data, rs);
    auto post = kplus_posterior(trace);
    CHECK(post.mode == 2);

    auto kernel = make_kernel(kspec, data);
    auto model = identify(trace, 2, *kernel);
    CHECK(model.khat == 2);
    const double discard_rate =
        static_cast<double>(model.n_draws_discarded) /
        (model.n_draws_used + model.n_draws_discarded);
    CHECK(discard_rate < 0.05);
    CHECK(adjusted_rand_index(model.final_partition, truth) > 0.95);

    // component summaries bracket the true means
    std::vector<double> mus{model.components[0].mean[0], model.components[1].mean[0]};
    std::sort(mus.begin(), mus.end());
    CHECK(mus[0] == doctest::Approx(1.0).epsilon(0.25));
    CHECK(mus[1] == doctest::Approx(20.0).epsilon(0.1));
    CHECK(model.components[0].weight_mean + model.components[1].weight_mean ==
          doctest::Approx(1.0).epsilon(0.05));

    CHECK_THROWS_AS(identify(trace, 5, *kernel), std::runtime_error);

    // equivariance: permuting the component indices of the stored trace
    // leaves the final partition unchanged (up to relabeling)
    ChainTrace permuted = trace;
    for (auto& s : permuted.sweeps) {
        const int trunc = 6;
        std::vector<int> perm(trunc);
        for (int k = 0; k < trunc; ++k) perm[k] = (k + 2) % trunc;
        for (auto& id : s.component_ids) id = perm[id];
        for (auto& lab : s.allocations) lab = perm[lab];
    }
    auto model_p = identify(permuted, 2, *kernel);
    CHECK(adjusted_rand_index(model_p.final_partition, model.final_partition) ==
          doctest::Approx(1.0));
}

TEST_CASE("identify with khat=1 yields the trivial partition") {
    RngStream data_rng(407, 0);
    CountData counts;
    for (int i = 0; i < 60; ++i) counts.y.push_back(sample_poisson(4.0, data_rng));
    Dataset data{std::move(counts)};

    KernelSpec kspec;
    kspec.type = KernelSpec::Type::poisson;
    ModelSpec spec;
    spec.kernel = kspec;
    spec.family = Family::sfm;
    spec.K = 5;
    spec.precision_prior.type = PrecisionPrior::Type::gamma;
    spec.precision_prior.gamma = {1.0, 100.0};

    RunSettings rs;
    rs.burnin = 500;
    rs.keep = 800;
    rs.seed = 408;
    auto trace = run_chain(spec, data, rs);
    CHECK(kplus_posterior(trace).mode == 1);

    auto kernel = make_kernel(kspec, data);
    auto trivial = identify(trace, 1, *kernel);
    CHECK(trivial.n_draws_discarded == 0);
    for (int lab : trivial.final_partition) CHECK(lab == 0);
}
