#include <doctest.h>

#include <cmath>
#include <map>

#include "sparsemix/partition.hpp"
#include "sparsemix/special.hpp"
#include "support.hpp"

using namespace sparsemix;

TEST_CASE("kplus and incremental counts") {
    auto st = AllocationState::from_labels({0, 0, 0, 2, 2}, 3);
    CHECK(st.counts == std::vector<int>{3, 0, 2});
    CHECK(st.kplus() == 2);
    CHECK(st.max_occupied() == 3);

    st.move(0, 1);
    CHECK(st.counts == std::vector<int>{2, 1, 2});
    CHECK(st.kplus() == 3);
    st.check_consistent();

    auto single = AllocationState::from_labels({0, 0, 0, 0, 0}, 1);
    CHECK(single.kplus() == 1);
    auto sparse = AllocationState::from_labels(std::vector<int>(7, 9), 10);
    CHECK(sparse.kplus() == 1);
    CHECK(sparse.counts[9] == 7);
}

TEST_CASE("incremental counts match recomputation under random moves") {
    RngStream rng(3, 0);
    auto st = AllocationState::from_labels({0, 1, 2, 0, 1, 2, 0, 1}, 4);
    for (int it = 0; it < 2000; ++it) {
        int i = static_cast<int>(rng.next_u64() % st.labels.size());
        int to = static_cast<int>(rng.next_u64() % st.counts.size());
        st.move(i, to);
        CHECK(st.kplus() <= std::min<int>(st.n_obs, static_cast<int>(st.counts.size())));
    }
    st.check_consistent();
}

TEST_CASE("sfm partition prior closed-form cases") {
    auto together = AllocationState::from_labels({0, 0}, 2);
    auto apart = AllocationState::from_labels({0, 1}, 2);
    // P(S1 = S2) under Dir(1,1) is 2/3 by direct integration of sum eta_k^2
    CHECK(log_prior_partition_sfm(together, 1.0, 2) ==
          doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-12));
    CHECK(log_prior_partition_sfm(apart, 1.0, 2) ==
          doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));
    CHECK(std::isfinite(log_prior_partition_sfm(together, 1e-10, 2)));
    CHECK(std::isfinite(log_prior_partition_sfm(apart, 1e-8, 2)));
    CHECK_THROWS_AS(log_prior_partition_sfm_counts({1, 1, 1}, 3, 1.0, 2), std::domain_error);
}

TEST_CASE("dpm partition prior closed-form cases") {
    auto one = AllocationState::from_labels({0, 0}, 2);
    auto two = AllocationState::from_labels({0, 1}, 2);
    // CRP with alpha=1: P(same table) = 1/(1+alpha) = 1/2
    CHECK(log_prior_partition_dpm(one, 1.0) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    CHECK(log_prior_partition_dpm(two, 1.0) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    CHECK(std::isfinite(log_prior_partition_dpm(one, 1e-10)));
}

TEST_CASE("sfm partition prior normalizes over set partitions") {
    // Each set partition is counted once via its canonical labeling; the
    // displayed prior already carries the K!/(K-K+)! labeling factor.
    for (int n : {2, 3, 4, 5}) {
        for (int K : {2, 3}) {
            for (double e0 : {0.05, 1.0, 4.0}) {
                double acc = -std::numeric_limits<double>::infinity();
                for (const auto& labels : testsupport::set_partitions(n, K)) {
                    auto st = AllocationState::from_labels(labels, K);
                    acc = log_add_exp(acc, log_prior_partition_sfm(st, e0, K));
                }
                CHECK(std::fabs(std::exp(acc) - 1.0) < 1e-10);
            }
        }
    }
}

TEST_CASE("dpm partition prior normalizes over set partitions") {
    for (int n : {2, 3, 4}) {
        for (double alpha : {0.3, 1.0, 2.0}) {
            double acc = -std::numeric_limits<double>::infinity();
            for (const auto& labels : testsupport::set_partitions(n, n)) {
                auto st = AllocationState::from_labels(labels, n);
                acc = log_add_exp(acc, log_prior_partition_dpm(st, alpha));
            }
            CHECK(std::fabs(std::exp(acc) - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("sequential urn consistency for the sfm prior") {
    // Building allocations one observation at a time with the urn
    // probabilities (existing cluster w.p. prop. to N_k + e0, new cluster
    // w.p. prop. to e0 (K - K+)) must reproduce the partition prior.
    const int n = 4, K = 3;
    const double e0 = 0.7;
    RngStream rng(23, 0);
    const int reps = 200000;
    std::map<std::vector<int>, int> freq;
    for (int r = 0; r < reps; ++r) {
        std::vector<int> labels{0};
        std::vector<int> block_sizes{1};
        for (int i = 1; i < n; ++i) {
            std::vector<double> w;
            for (int b = 0; b < static_cast<int>(block_sizes.size()); ++b)
                w.push_back(block_sizes[b] + e0);
            int kp = static_cast<int>(block_sizes.size());
            w.push_back(e0 * (K - kp));
            int pick = sample_categorical(w, rng);
            if (pick == static_cast<int>(block_sizes.size())) {
                labels.push_back(pick);
                block_sizes.push_back(1);
            } else {
                labels.push_back(pick);
                ++block_sizes[pick];
            }
        }
        ++freq[labels];
    }
    for (const auto& [labels, count] : freq) {
        auto st = AllocationState::from_labels(labels, K);
        double expected = std::exp(log_prior_partition_sfm(st, e0, K));
        double got = static_cast<double>(count) / reps;
        double se = std::sqrt(expected * (1 - expected) / reps);
        CHECK(std::fabs(got - expected) < 5.0 * se + 1e-4);
    }
}

TEST_CASE("new-cluster probabilities") {
    CHECK(prob_new_cluster_sfm(100, 0.7, 5, 5) == 0.0);
    CHECK(prob_new_cluster_sfm(100, 0.005, 10, 2) ==
          doctest::Approx(0.005 * 8 / (99 + 0.05)).epsilon(1e-12));
    // e0 -> infinity with one free component approaches 1/K
    CHECK(prob_new_cluster_sfm(50, 1e12, 4, 3) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK_THROWS_AS(prob_new_cluster_sfm(10, 1.0, 3, 4), std::domain_error);

    CHECK(prob_new_cluster_dpm(2, 1.0) == doctest::Approx(0.5));
    CHECK(prob_new_cluster_dpm(100, 0.05) == doctest::Approx(0.05 / 99.05).epsilon(1e-12));
    CHECK(prob_new_cluster_dpm(100, 1e-12) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("prior pmf of the cluster count") {
    RngStream rng(29, 0);
    SUBCASE("K=1 is a point mass") {
        auto pmf = prior_kplus_pmf(1, 0.5, 50, 10, rng);
        CHECK(pmf[0] == doctest::Approx(1.0));
    }
    SUBCASE("e0=4 concentrates near K") {
        auto pmf = prior_kplus_pmf(10, 4.0, 100, 20000, rng);
        int mode = 0;
        for (int k = 1; k < 10; ++k)
            if (pmf[k] > pmf[mode]) mode = k;
        CHECK(mode + 1 >= 8);
    }
    SUBCASE("e0=0.005 prefers one cluster") {
        auto pmf = prior_kplus_pmf(10, 0.005, 100, 20000, rng);
        int mode = 0;
        for (int k = 1; k < 10; ++k)
            if (pmf[k] > pmf[mode]) mode = k;
        CHECK(mode == 0);
        double total = 0.0;
        for (double p : pmf) total += p;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}
