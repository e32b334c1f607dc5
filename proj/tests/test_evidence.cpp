#include <doctest.h>

#include <cmath>

#include "sparsemix/evidence.hpp"
#include "support.hpp"

using namespace sparsemix;

namespace {

Dataset poisson_n8() {
    return Dataset{CountData{{0, 1, 0, 2, 11, 9, 1, 14}}};
}

KernelSpec poisson_fixed_spec() {
    KernelSpec spec;
    spec.type = KernelSpec::Type::poisson;
    spec.poisson.a0 = 0.5;
    spec.poisson.g0 = 0.5;
    spec.poisson.G0 = 0.2;
    spec.poisson.fixed_b0 = 0.5 / 0.2;  // prior mean of b0
    return spec;
}

}  // namespace

TEST_CASE("one-component evidence, fear data") {
    auto data = load_fear();
    KernelSpec spec;
    spec.type = KernelSpec::Type::categorical;
    auto kernel = make_kernel(spec, data);
    auto est = log_evidence_k1(*kernel);
    CHECK(est.log_value == doctest::Approx(-333.0103994505030).epsilon(1e-10));
    CHECK(est.std_error == 0.0);
}

TEST_CASE("one-component evidence, binary hand case and empty data") {
    CategoricalData d;
    d.cardinalities = {2};
    d.codes = {{0}, {0}};
    Dataset data{std::move(d)};
    KernelSpec spec;
    spec.type = KernelSpec::Type::categorical;
    auto kernel = make_kernel(spec, data);
    // B(3,1)/B(1,1) = 1/3 for two observations of the same binary category
    CHECK(log_evidence_k1(*kernel).log_value ==
          doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));

    CategoricalData empty;
    empty.cardinalities = {2};
    Dataset edata{std::move(empty)};
    auto ekernel = make_kernel(spec, edata);
    CHECK(log_evidence_k1(*ekernel).log_value == doctest::Approx(0.0));
}

TEST_CASE("evidence is unsupported for non-conjugate kernels") {
    RegressionData d;
    d.y = {1, 2};
    d.x = {{1.0}, {1.0}};
    Dataset data{std::move(d)};
    KernelSpec spec;
    spec.type = KernelSpec::Type::poisson_glm;
    auto kernel = make_kernel(spec, data);
    CHECK_THROWS_AS(log_evidence_k1(*kernel), UnsupportedEvidence);
    CHECK_THROWS_AS(log_evidence_enumeration(*kernel, 2, 1.0), UnsupportedEvidence);

    // hierarchical-b0 Poisson is not conjugate either
    Dataset counts{CountData{{1, 2, 3}}};
    KernelSpec pspec;
    pspec.type = KernelSpec::Type::poisson;
    auto pkernel = make_kernel(pspec, counts);
    CHECK_THROWS_AS(log_evidence_k1(*pkernel), UnsupportedEvidence);
}

TEST_CASE("enumeration equals the analytic value at K=1 and is exchangeable") {
    auto data = poisson_n8();
    auto kernel = make_kernel(poisson_fixed_spec(), data);
    auto k1 = log_evidence_k1(*kernel);
    auto e1 = log_evidence_enumeration(*kernel, 1, 1.0);
    CHECK(e1.log_value == doctest::Approx(k1.log_value).epsilon(1e-12));

    auto e2 = log_evidence_enumeration(*kernel, 2, 0.7);

    Dataset permuted{CountData{{14, 1, 9, 11, 2, 0, 1, 0}}};
    auto kernel_p = make_kernel(poisson_fixed_spec(), permuted);
    auto e2p = log_evidence_enumeration(*kernel_p, 2, 0.7);
    CHECK(e2.log_value == doctest::Approx(e2p.log_value).epsilon(1e-12));

    CHECK_THROWS_AS(log_evidence_enumeration(*kernel, 10, 1.0), UnsupportedEvidence);
}

TEST_CASE("enumeration matches the four-term hand case") {
    CategoricalData d;
    d.cardinalities = {2};
    d.codes = {{0}, {0}};
    Dataset data{std::move(d)};
    KernelSpec spec;
    spec.type = KernelSpec::Type::categorical;
    auto kernel = make_kernel(spec, data);
    // (2/3) p(y | together) + (1/3) p(y | apart) = (2/3)(1/3) + (1/3)(1/4)
    auto est = log_evidence_enumeration(*kernel, 2, 1.0);
    CHECK(est.log_value == doctest::Approx(std::log(11.0 / 36.0)).epsilon(1e-12));
}

namespace {

ChainTrace evidence_trace(const KernelSpec& kspec, const Dataset& data, int K, double e0,
                          std::uint64_t seed) {
    ModelSpec spec;
    spec.kernel = kspec;
    spec.family = Family::sfm;
    spec.K = K;
    spec.precision_prior.type = PrecisionPrior::Type::fixed;
    spec.precision_prior.value = e0;
    spec.init_k = K;
    RunSettings rs;
    rs.burnin = 800;
    rs.keep = 2500;
    rs.seed = seed;
    rs.record_all_components = true;
    rs.store_allocations = true;
    return run_chain(spec, data, rs);
}

}  // namespace

TEST_CASE("bridge sampling agrees with the enumeration oracle") {
    auto data = poisson_n8();
    const double e0 = 1.0;
    auto kernel = make_kernel(poisson_fixed_spec(), data);
    const double oracle = log_evidence_enumeration(*kernel, 2, e0).log_value;

    int failures = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto trace = evidence_trace(poisson_fixed_spec(), data, 2, e0, seed);
        BridgeOptions opts;
        opts.m_posterior = 1500;
        opts.m_q = 1500;
        opts.seed = 1000 + seed;
        auto est = log_evidence_bridge(*kernel, 2, e0, trace, opts);
        CHECK(est.std_error > 0.0);
        CHECK(est.std_error < 0.3);
        if (std::fabs(est.log_value - oracle) > 3.0 * est.std_error) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("bridge collapses to the analytic value at K=1") {
    auto data = poisson_n8();
    auto kernel = make_kernel(poisson_fixed_spec(), data);
    auto trace = evidence_trace(poisson_fixed_spec(), data, 1, 1.0, 3);
    BridgeOptions opts;
    opts.m_posterior = 1000;
    opts.m_q = 1000;
    auto est = log_evidence_bridge(*kernel, 1, 1.0, trace, opts);
    auto exact = log_evidence_k1(*kernel);
    CHECK(std::fabs(est.log_value - exact.log_value) < std::max(3.0 * est.std_error, 0.05));
}

TEST_CASE("bridge is invariant to relabeling the trace components") {
    auto data = poisson_n8();
    const double e0 = 1.0;
    auto kernel = make_kernel(poisson_fixed_spec(), data);
    auto trace = evidence_trace(poisson_fixed_spec(), data, 2, e0, 17);

    ChainTrace swapped = trace;
    for (auto& s : swapped.sweeps) {
        std::swap(s.component_weights[0], s.component_weights[1]);
        std::swap(s.component_theta[0], s.component_theta[1]);
        for (auto& lab : s.allocations) lab = 1 - lab;
    }
    BridgeOptions opts;
    opts.m_posterior = 1200;
    opts.m_q = 1200;
    auto a = log_evidence_bridge(*kernel, 2, e0, trace, opts);
    auto b = log_evidence_bridge(*kernel, 2, e0, swapped, opts);
    CHECK(std::fabs(a.log_value - b.log_value) <
          3.0 * std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error) + 0.02);
}
