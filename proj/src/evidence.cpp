#include "sparsemix/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparsemix/special.hpp"

namespace sparsemix {

std::string evidence_method_name(EvidenceEstimate::Method method) {
    switch (method) {
        case EvidenceEstimate::Method::analytic: return "analytic";
        case EvidenceEstimate::Method::enumeration: return "enumeration";
        case EvidenceEstimate::Method::bridge: return "bridge";
    }
    return "unknown";
}

EvidenceEstimate log_evidence_k1(const Kernel& kernel) {
    if (!kernel.conjugate())
        throw UnsupportedEvidence("log_evidence_k1: kernel is not conjugate");
    std::vector<int> all(kernel.n_obs());
    std::iota(all.begin(), all.end(), 0);
    EvidenceEstimate est;
    est.log_value = kernel.log_subset_evidence(all);
    est.method = EvidenceEstimate::Method::analytic;
    est.K = 1;
    return est;
}

EvidenceEstimate log_evidence_enumeration(const Kernel& kernel, int K, double e0) {
    if (!kernel.conjugate())
        throw UnsupportedEvidence("log_evidence_enumeration: kernel is not conjugate");
    if (K < 1 || !(e0 > 0.0))
        throw std::invalid_argument("log_evidence_enumeration: need K >= 1 and e0 > 0");
    const int n = kernel.n_obs();
    double combos = std::pow(static_cast<double>(K), n);
    if (combos > 1e7)
        throw UnsupportedEvidence("log_evidence_enumeration: K^N exceeds the 1e7 guard");

    // constant part of the labeled-allocation prior
    const double log_prior_const = log_gamma_stable(K * e0) - log_gamma_stable(n + K * e0);
    const double lg_e0 = log_gamma_stable(e0);

    std::vector<int> labels(n, 0);
    std::vector<std::vector<int>> members(K);
    double acc = -std::numeric_limits<double>::infinity();
    for (;;) {
        for (auto& m : members) m.clear();
        for (int i = 0; i < n; ++i) members[labels[i]].push_back(i);
        double term = log_prior_const;
        for (int k = 0; k < K; ++k) {
            if (members[k].empty()) continue;
            term += log_gamma_stable(members[k].size() + e0) - lg_e0;
            term += kernel.log_subset_evidence(members[k]);
        }
        acc = log_add_exp(acc, term);

        int pos = n - 1;
        while (pos >= 0 && labels[pos] == K - 1) labels[pos--] = 0;
        if (pos < 0) break;
        ++labels[pos];
    }
    EvidenceEstimate est;
    est.log_value = acc;
    est.method = EvidenceEstimate::Method::enumeration;
    est.K = K;
    return est;
}

namespace {

struct BridgePoint {
    std::vector<Theta> thetas;   // K components
    std::vector<double> eta;     // K weights
};

struct ImportanceDensity {
    const Kernel* kernel;
    int K;
    double e0;
    // per stored draw: member lists per component
    std::vector<std::vector<std::vector<int>>> draw_members;
    std::vector<std::vector<int>> perms;

    double log_density(const BridgePoint& p) const {
        const int n_draws = static_cast<int>(draw_members.size());

        // Distinct theta-conditional densities: component k of the point
        // against group g of draw l. The permutation sum below only permutes
        // which group feeds which component, so this K x (n_draws*K) table
        // covers every term.
        std::vector<double> dens(static_cast<std::size_t>(K) * n_draws * K);
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < n_draws; ++l)
                for (int g = 0; g < K; ++g) {
                    const auto& grp = draw_members[l][g];
                    dens[(static_cast<std::size_t>(k) * n_draws + l) * K + g] =
                        grp.empty() ? kernel->log_prior_density(p.thetas[k])
                                    : kernel->log_conditional_density(p.thetas[k], grp);
                }

        // Dirichlet factor: the normalizer depends only on the multiset of
        // group sizes, so it is permutation-invariant per draw.
        std::vector<double> log_eta(K);
        for (int k = 0; k < K; ++k) log_eta[k] = std::log(std::max(p.eta[k], 1e-300));
        std::vector<double> eta_norm(n_draws);
        std::vector<double> conc(static_cast<std::size_t>(n_draws) * K);
        for (int l = 0; l < n_draws; ++l) {
            double total = 0.0, norm = 0.0;
            for (int g = 0; g < K; ++g) {
                double c = e0 + draw_members[l][g].size();
                conc[static_cast<std::size_t>(l) * K + g] = c;
                total += c;
                norm -= log_gamma_stable(c);
            }
            eta_norm[l] = norm + log_gamma_stable(total);
        }

        std::vector<double> terms;
        terms.reserve(static_cast<std::size_t>(n_draws) * perms.size());
        for (int l = 0; l < n_draws; ++l) {
            for (const auto& perm : perms) {
                double t = eta_norm[l];
                for (int k = 0; k < K; ++k) {
                    const int g = perm[k];
                    t += dens[(static_cast<std::size_t>(k) * n_draws + l) * K + g];
                    t += (conc[static_cast<std::size_t>(l) * K + g] - 1.0) * log_eta[k];
                }
                terms.push_back(t);
            }
        }
        return log_sum_exp(terms) - std::log(static_cast<double>(n_draws) * perms.size());
    }

    BridgePoint draw(Kernel& mutable_kernel, RngStream& rng) const {
        const auto& members =
            draw_members[rng.next_u64() % draw_members.size()];
        const auto& perm = perms[rng.next_u64() % perms.size()];
        BridgePoint p;
        std::vector<double> conc(K);
        p.thetas.reserve(K);
        for (int k = 0; k < K; ++k) {
            const auto& grp = members[perm[k]];
            conc[k] = e0 + grp.size();
            if (grp.empty())
                p.thetas.push_back(mutable_kernel.sample_prior(rng));
            else
                p.thetas.push_back(
                    mutable_kernel.sample_conditional(grp, mutable_kernel.sample_prior(rng),
                                                      false, rng));
        }
        p.eta = sample_dirichlet(conc, rng);
        return p;
    }
};

double log_unnormalized_posterior(const Kernel& kernel, const BridgePoint& p, double e0, int K) {
    double lp = 0.0;
    const int n = kernel.n_obs();
    std::vector<double> terms(K);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < K; ++k)
            terms[k] = std::log(std::max(p.eta[k], 1e-300)) + kernel.loglik_point(p.thetas[k], i);
        lp += log_sum_exp(terms);
    }
    const std::vector<double> conc(K, e0);
    lp += log_dirichlet_pdf(p.eta, conc);
    for (const auto& t : p.thetas) lp += kernel.log_prior_density(t);
    return lp;
}

/// Meng-Wong iteration on the log scale; A and B are log(p*/q) at the
/// q-draws and the posterior draws respectively.
double iterate_bridge(const std::vector<double>& A, const std::vector<double>& B, double tol,
                      int max_iter) {
    const double m2 = static_cast<double>(A.size());
    const double m1 = static_cast<double>(B.size());
    const double log_s1 = std::log(m1 / (m1 + m2));
    const double log_s2 = std::log(m2 / (m1 + m2));
    double r = log_sum_exp(A) - std::log(m2);  // importance-sampling start
    std::vector<double> num(A.size()), den(B.size());
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t j = 0; j < A.size(); ++j)
            num[j] = A[j] - log_add_exp(log_s1 + A[j], log_s2 + r);
        for (std::size_t m = 0; m < B.size(); ++m)
            den[m] = -log_add_exp(log_s1 + B[m], log_s2 + r);
        double r_next =
            (log_sum_exp(num) - std::log(m2)) - (log_sum_exp(den) - std::log(m1));
        if (std::fabs(r_next - r) < tol) return r_next;
        r = r_next;
    }
    return r;
}

}  // namespace

EvidenceEstimate log_evidence_bridge(Kernel& kernel, int K, double e0, const ChainTrace& trace,
                                     const BridgeOptions& options) {
    if (!kernel.conjugate())
        throw UnsupportedEvidence("log_evidence_bridge: kernel is not conjugate");
    if (trace.sweeps.empty()) throw std::invalid_argument("log_evidence_bridge: empty trace");
    if (trace.family != Family::sfm || trace.model_order != K)
        throw std::invalid_argument("log_evidence_bridge: trace is not a fixed-K SFM run");

    const int m_total = static_cast<int>(trace.sweeps.size());
    const int s0 = std::min(options.s0, m_total);
    const int m_post = std::min(options.m_posterior, m_total);

    // Importance density from an evenly thinned subsequence of allocations.
    ImportanceDensity q;
    q.kernel = &kernel;
    q.K = K;
    q.e0 = e0;
    for (int l = 0; l < s0; ++l) {
        const auto& rec = trace.sweeps[static_cast<std::size_t>(l) * m_total / s0];
        if (rec.allocations.empty())
            throw std::invalid_argument("log_evidence_bridge: trace lacks allocations");
        std::vector<std::vector<int>> members(K);
        for (int i = 0; i < trace.n_obs; ++i) members[rec.allocations[i]].push_back(i);
        q.draw_members.push_back(std::move(members));
    }
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        q.perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    // Posterior draws, evenly thinned, reconstructed from the stored trace.
    auto posterior_point = [&](int index) {
        const auto& rec = trace.sweeps[index];
        if (static_cast<int>(rec.component_ids.size()) != K)
            throw std::invalid_argument(
                "log_evidence_bridge: trace must record every component per sweep");
        BridgePoint p;
        p.eta.resize(K);
        p.thetas.reserve(K);
        for (int k = 0; k < K; ++k) {
            p.eta[rec.component_ids[k]] = rec.component_weights[k];
            p.thetas.push_back(Theta{});
        }
        for (int k = 0; k < K; ++k)
            p.thetas[rec.component_ids[k]] = kernel.unflatten(rec.component_theta[k]);
        return p;
    };

    RngStream rng(options.seed, 9001);
    std::vector<double> A(options.m_q), B(m_post);
    for (int j = 0; j < options.m_q; ++j) {
        BridgePoint p = q.draw(kernel, rng);
        A[j] = log_unnormalized_posterior(kernel, p, e0, K) - q.log_density(p);
    }
    std::vector<BridgePoint> post_points(m_post);
    for (int m = 0; m < m_post; ++m) {
        post_points[m] = posterior_point(static_cast<std::size_t>(m) * m_total / m_post);
        B[m] = log_unnormalized_posterior(kernel, post_points[m], e0, K) -
               q.log_density(post_points[m]);
    }

    const auto [bmin, bmax] = std::minmax_element(B.begin(), B.end());
    if (m_post > 10 && *bmax - *bmin == 0.0)
        throw std::runtime_error("log_evidence_bridge: degenerate trace (identical draws)");

    EvidenceEstimate est;
    est.method = EvidenceEstimate::Method::bridge;
    est.K = K;
    est.log_value = iterate_bridge(A, B, options.tol, options.max_iter);

    // Batched standard error. Each batch rebuilds the importance density from
    // a disjoint subset of the stored allocations and reruns the full
    // iteration on its own posterior block, so the Monte Carlo variability of
    // the density construction itself enters the spread.
    const int nb =
        std::max(2, std::min({options.batches, s0, std::min(m_post, options.m_q) / 4}));
    std::vector<double> batch_est;
    for (int b = 0; b < nb; ++b) {
        ImportanceDensity qb;
        qb.kernel = &kernel;
        qb.K = K;
        qb.e0 = e0;
        qb.perms = q.perms;
        for (int l = b; l < s0; l += nb) qb.draw_members.push_back(q.draw_members[l]);

        const int a_lo = static_cast<int>(static_cast<std::size_t>(b) * A.size() / nb);
        const int a_hi = static_cast<int>(static_cast<std::size_t>(b + 1) * A.size() / nb);
        std::vector<double> Ab;
        Ab.reserve(a_hi - a_lo);
        for (int j = a_lo; j < a_hi; ++j) {
            BridgePoint p = qb.draw(kernel, rng);
            Ab.push_back(log_unnormalized_posterior(kernel, p, e0, K) - qb.log_density(p));
        }
        const int b_lo = static_cast<int>(static_cast<std::size_t>(b) * B.size() / nb);
        const int b_hi = static_cast<int>(static_cast<std::size_t>(b + 1) * B.size() / nb);
        std::vector<double> Bb;
        Bb.reserve(b_hi - b_lo);
        for (int m = b_lo; m < b_hi; ++m)
            Bb.push_back(log_unnormalized_posterior(kernel, post_points[m], e0, K) -
                         qb.log_density(post_points[m]));
        if (Ab.empty() || Bb.empty()) continue;
        batch_est.push_back(iterate_bridge(Ab, Bb, options.tol, options.max_iter));
    }
    double mean = std::accumulate(batch_est.begin(), batch_est.end(), 0.0) / batch_est.size();
    double var = 0.0;
    for (double r : batch_est) var += (r - mean) * (r - mean);
    var /= std::max<std::size_t>(1, batch_est.size() - 1);
    est.std_error = std::sqrt(var / batch_est.size());
    return est;
}

}  // namespace sparsemix
