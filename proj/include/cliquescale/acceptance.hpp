#pragma once

// The acceptance suite: eight end-to-end checks shared by the acceptance test
// binary and `cliquescale verify`. Each check returns a pass flag plus a short
// measured detail; nothing here relaxes a tolerance on failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "clique_census.hpp"
#include "exact_evaluator.hpp"
#include "graph_sampler.hpp"
#include "weight_model.hpp"

namespace cliquescale::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    std::uint64_t seed = 20240601;
    unsigned threads = 1;
};

namespace detail {

inline std::string fmt(double x, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << x;
    return os.str();
}

inline CriterionResult start(int id, std::string name) {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    return r;
}

inline std::vector<double> geometric(double lo, double hi, int per_decade) {
    std::vector<double> out;
    const int steps = static_cast<int>(std::lround(std::log10(hi / lo) * per_decade));
    for (int i = 0; i <= steps; ++i) out.push_back(lo * std::pow(10.0, static_cast<double>(i) / per_decade));
    return out;
}

}  // namespace detail

/// 1. Quadrature vs Monte Carlo over the (k, alpha, n) grid, 1e6 samples, 3 stderr.
inline CriterionResult oracle_equivalence(const Options& opt) {
    auto r = detail::start(1, "oracle equivalence (quadrature vs MC, 27 cells, 3 stderr)");
    double worst = 0.0;
    std::string worst_cell;
    int failures = 0;
    std::uint64_t cell = 0;
    for (double alpha : {2.5, 3.5, 4.5}) {
        const TailDistribution dist(alpha, SlowlyVarying::constant());
        for (int k : {2, 3, 4}) {
            for (double n : {1e2, 1e3, 1e4}) {
                const auto quad = clique_prob_quadrature(dist, k, n);
                const auto mc = clique_prob_mc(dist, k, n, 1'000'000,
                                               derive_key(opt.seed, StreamRole::Replica, cell++), opt.threads);
                const double diff = std::abs(quad.total - mc.mean);
                const double z = mc.std_error > 0.0 ? diff / mc.std_error : (diff == 0.0 ? 0.0 : INFINITY);
                if (!(z <= 3.0) || !quad.converged) ++failures;
                if (z > worst) {
                    worst = z;
                    worst_cell = "alpha=" + detail::fmt(alpha) + " k=" + std::to_string(k) + " n=" + detail::fmt(n);
                }
            }
        }
    }
    r.passed = failures == 0;
    r.detail = "max |z|=" + detail::fmt(worst, 3) + " at " + worst_cell + ", failures=" + std::to_string(failures);
    return r;
}

/// 2. Mean triangle count over 500 graphs vs C(n,3) P(K_3), 4 combined sigma.
inline CriterionResult graph_closure(const Options& opt) {
    auto r = detail::start(2, "graph-level closure (500 graphs, k=3, 4 combined sigma)");
    bool ok = true;
    std::string parts;
    std::uint64_t cell = 0;
    for (double alpha : {2.5, 3.5}) {
        const TailDistribution dist(alpha, SlowlyVarying::constant());
        for (std::size_t n : {std::size_t{500}, std::size_t{2000}}) {
            const auto quad = clique_prob_quadrature(dist, 3, static_cast<double>(n));
            const double expected = binomial(static_cast<double>(n), 3) * quad.total;
            const double expected_err = binomial(static_cast<double>(n), 3) * quad.max_term_error;
            cliquescale::detail::Moments mom;
            for (std::size_t rep = 0; rep < 500; ++rep) {
                SamplerConfig cfg;
                cfg.n = n;
                cfg.seed = derive_key(opt.seed + 2, StreamRole::Replica, cell * 1000 + rep);
                cfg.threads = opt.threads;
                mom.add(static_cast<double>(count_cliques(sample_graph(dist, cfg), 3, opt.threads).count));
            }
            ++cell;
            const double sigma = std::hypot(mom.std_error(), expected_err);
            const double z = std::abs(mom.mean - expected) / sigma;
            if (!(z <= 4.0)) ok = false;
            parts += " alpha=" + detail::fmt(alpha) + ",n=" + std::to_string(n) + ": z=" + detail::fmt(z, 3);
        }
    }
    r.passed = ok;
    r.detail = parts.substr(1);
    return r;
}

/// 3. Fitted exponents of quadrature P(K_k), l = 1, n = 1e2..1e6.
inline CriterionResult non_integer_exponents(const Options& opt) {
    auto r = detail::start(3, "non-integer alpha exponents (quadrature fits, n=1e2..1e6)");
    struct Case {
        int k;
        double alpha, theory, tol;
    };
    bool ok = true;
    std::string parts;
    const std::vector<double> grid = detail::geometric(1e2, 1e6, 1);
    for (const Case c : {Case{3, 2.5, -2.25, 0.15}, Case{3, 4.5, -3.0, 0.1}, Case{4, 2.5, -3.0, 0.2}}) {
        const TailDistribution dist(c.alpha, SlowlyVarying::constant());
        StudyOptions so;
        so.threads = opt.threads;
        const auto study = scaling_study(dist, c.k, grid, so);
        const bool converged = study.fit.verdict != Verdict::Inconclusive;
        const bool good = converged && std::abs(study.fit.slope - c.theory) <= c.tol;
        ok = ok && good;
        parts += " k=" + std::to_string(c.k) + ",alpha=" + detail::fmt(c.alpha) + ": slope=" +
                 detail::fmt(study.fit.slope, 5) + " (" + detail::fmt(c.theory) + "+-" + detail::fmt(c.tol) + ")";
    }
    r.passed = ok;
    r.detail = parts.substr(1);
    return r;
}

/// 4. C(n,4) P(K_4) strictly decreasing in n for alpha = 3.5.
inline CriterionResult decreasing_cliques(const Options& opt) {
    auto r = detail::start(4, "A_4(n) strictly decreasing (alpha=3.5, n=1e3..1e6)");
    const TailDistribution dist(3.5, SlowlyVarying::constant());
    EvaluatorOptions ev;
    ev.threads = opt.threads;
    double prev = INFINITY;
    bool ok = true;
    std::string parts;
    for (double n : {1e3, 1e4, 1e5, 1e6}) {
        const double a = binomial(n, 4) * clique_prob_quadrature(dist, 4, n, ev).total;
        if (!(a < prev)) ok = false;
        prev = a;
        parts += " " + detail::fmt(a, 5);
    }
    r.passed = ok;
    r.detail = "A_4 =" + parts;
    return r;
}

/// 5. k = alpha = 3, l = 1: P(K_3) / (n^-3 ln(sqrt n)^3) within 10% over the last decade of 1e3..1e7.
inline CriterionResult integer_alpha_example(const Options& opt) {
    auto r = detail::start(5, "integer alpha k=alpha=3 log correction (last decade of 1e3..1e7, <10%)");
    const TailDistribution dist(3.0, SlowlyVarying::constant());
    EvaluatorOptions ev;
    ev.threads = opt.threads;
    double lo = INFINITY, hi = 0.0;
    bool converged = true;
    for (double n : detail::geometric(1e6, 1e7, 4)) {
        const auto rep = clique_prob_quadrature(dist, 3, n, ev);
        converged = converged && rep.converged;
        const double ratio = rep.total / (std::pow(n, -3.0) * std::pow(std::log(std::sqrt(n)), 3));
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    const double spread = hi / lo - 1.0;
    r.passed = converged && spread < 0.10;
    r.detail = "ratio range [" + detail::fmt(lo, 5) + ", " + detail::fmt(hi, 5) + "], spread=" + detail::fmt(spread, 3);
    return r;
}

/// 6. Q closed forms for l = 1 and formal l = log.
inline CriterionResult q_closed_forms(const Options&) {
    auto r = detail::start(6, "Q closed forms (1e-8 relative)");
    double worst = 0.0;
    for (int alpha : {3, 4, 5}) {
        for (double x : {std::exp(1.0), 10.0, 1e3}) {
            const double lx = std::log(x);
            const double one = q_function(alpha, SlowlyVarying::constant(), x);
            const double log = q_function(alpha, SlowlyVarying::log_formal(), x, true);
            const double want_one = (alpha - 1) * lx;
            const double want_log = (alpha - 1) / 2.0 * lx * lx - lx;
            worst = std::max(worst, std::abs(one / want_one - 1.0));
            worst = std::max(worst, std::abs(log / want_log - 1.0));
        }
    }
    r.passed = worst <= 1e-8;
    r.detail = "max relative error=" + detail::fmt(worst, 3);
    return r;
}

/// 7. Clique counter vs brute force on 500 random graphs; skip vs naive edge marginals.
inline CriterionResult counter_and_sampler(const Options& opt) {
    auto r = detail::start(7, "clique counter vs brute force, skip vs naive marginals");
    std::mt19937_64 gen(derive_key(opt.seed, StreamRole::Replica, 7));
    int mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = std::uniform_int_distribution<std::size_t>(1, 25)(gen);
        const double density = std::uniform_real_distribution<double>(0.05, 0.95)(gen);
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (std::bernoulli_distribution(density)(gen))
                    edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
        const WeightedGraph g(n, {}, std::move(edges));
        const int k = std::uniform_int_distribution<int>(1, 5)(gen);
        if (count_cliques(g, k).count != brute_force_count(g, k)) ++mismatches;
    }

    // Fixed weight vector; 50 pairs biased toward heavy nodes so frequencies span (0, 1].
    const std::size_t n = 300;
    const TailDistribution dist(2.5, SlowlyVarying::constant());
    const auto weights = sample_weights(dist, n, opt.seed);
    std::vector<Edge> pairs;
    std::uniform_int_distribution<NodeId> pick(0, n - 1);
    while (pairs.size() < 50) {
        NodeId u = pick(gen), v = pick(gen);
        if (pairs.size() < 25) {
            // heavy-ish partner: best of three draws
            for (int t = 0; t < 2; ++t) {
                const NodeId w = pick(gen);
                if (weights[w] > weights[v]) v = w;
            }
        }
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        pairs.emplace_back(u, v);
    }
    const int replicas = 10'000;
    std::vector<double> naive_hits(pairs.size()), skip_hits(pairs.size());
    for (int rep = 0; rep < replicas; ++rep) {
        const auto seed = derive_key(opt.seed + 7, StreamRole::Replica, static_cast<std::uint64_t>(rep));
        const WeightedGraph a(n, weights, sample_edges_naive(weights, dist.mu(), seed));
        const WeightedGraph b(n, weights, sample_edges_skip(weights, dist.mu(), seed));
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            naive_hits[p] += a.has_edge(pairs[p].first, pairs[p].second);
            skip_hits[p] += b.has_edge(pairs[p].first, pairs[p].second);
        }
    }
    double worst = 0.0;
    int outside = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double fa = naive_hits[p] / replicas, fb = skip_hits[p] / replicas;
        const double pooled = (fa + fb) / 2.0;
        const double sigma = std::sqrt(pooled * (1.0 - pooled) * 2.0 / replicas);
        const double z = sigma > 0.0 ? std::abs(fa - fb) / sigma : (fa == fb ? 0.0 : INFINITY);
        worst = std::max(worst, z);
        if (!(z <= 4.0)) ++outside;
    }
    r.passed = mismatches == 0 && outside == 0;
    r.detail = "count mismatches=" + std::to_string(mismatches) + "/500, marginal max |z|=" + detail::fmt(worst, 3) +
               " over 50 pairs";
    return r;
}

/// 8. Report identity and term ranges over a grid; extreme_low dominance at n = 1e6 for k=3, alpha=4.5.
inline CriterionResult decomposition_integrity(const Options& opt) {
    auto r = detail::start(8, "decomposition integrity and k<alpha dominance");
    EvaluatorOptions ev;
    ev.threads = opt.threads;
    int reports = 0, bad = 0;
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    for (double alpha : {2.5, 3.0, 3.5, 4.5}) {
        for (const auto& l : {SlowlyVarying::constant(), SlowlyVarying::log_shifted()}) {
            const TailDistribution dist(alpha, l);
            for (int k = 2; k <= 5; ++k) {
                for (double n : {1e2, 1e4, 1e6}) {
                    const auto rep = clique_prob_quadrature(dist, k, n, ev);
                    ++reports;
                    bool good = rep.total == rep.term_sum() && in_unit(rep.total) && in_unit(rep.extreme_low) &&
                                in_unit(rep.extreme_high);
                    for (double t : rep.intermediate) good = good && in_unit(t);
                    if (!good) ++bad;
                }
            }
        }
    }
    const TailDistribution dist(4.5, SlowlyVarying::constant());
    const auto rep = clique_prob_quadrature(dist, 3, 1e6, ev);
    const double ratio = rep.extreme_low / rep.total;
    r.passed = bad == 0 && ratio > 0.9;
    r.detail = "identity/range violations=" + std::to_string(bad) + "/" + std::to_string(reports) +
               ", extreme_low/total=" + detail::fmt(ratio, 6);
    return r;
}

using Criterion = std::function<CriterionResult(const Options&)>;

inline std::vector<Criterion> criteria() {
    return {oracle_equivalence, graph_closure,   non_integer_exponents, decreasing_cliques,
            integer_alpha_example, q_closed_forms, counter_and_sampler, decomposition_integrity};
}

inline std::string format_line(const CriterionResult& r) {
    std::ostringstream os;
    os << "criterion " << r.id << " " << (r.passed ? "PASS" : "FAIL") << " [" << r.name << "] " << r.detail << " ("
       << detail::fmt(r.seconds, 3) << " s)";
    return os.str();
}

/// Runs the selected criteria (all when `only` is empty), reporting each as it finishes.
inline std::vector<CriterionResult> run(const Options& opt, const std::vector<int>& only = {},
                                        const std::function<void(const CriterionResult&)>& report = {}) {
    std::vector<CriterionResult> out;
    const auto all = criteria();
    for (std::size_t i = 0; i < all.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        CriterionResult res;
        try {
            res = all[i](opt);
        } catch (const std::exception& e) {
            res.id = id;
            res.name = "criterion " + std::to_string(id);
            res.passed = false;
            res.detail = std::string("exception: ") + e.what();
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (report) report(res);
        out.push_back(res);
    }
    return out;
}

}  // namespace cliquescale::acceptance
