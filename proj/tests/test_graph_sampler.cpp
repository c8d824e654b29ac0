#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <cliquescale/exact_evaluator.hpp>
#include <cliquescale/graph.hpp>
#include <cliquescale/graph_sampler.hpp>

#include "oracles.hpp"

using namespace cliquescale;

namespace {

TailDistribution pareto(double alpha) { return TailDistribution(alpha, SlowlyVarying::constant()); }

SamplerConfig config(SamplerMethod method, std::uint64_t seed, std::size_t n, unsigned threads) {
    SamplerConfig c;
    c.method = method;
    c.seed = seed;
    c.n = n;
    c.threads = threads;
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace

// ---- edge probability ----

TEST(EdgeProbability, Examples) {
    EXPECT_DOUBLE_EQ(edge_probability(1, 1, 2, 50), 0.01);
    EXPECT_DOUBLE_EQ(edge_probability(10, 10, 2, 50), 1.0);
    EXPECT_DOUBLE_EQ(edge_probability(20, 10, 2, 50), 1.0);
    EXPECT_DOUBLE_EQ(edge_probability(3, 7, 2.5, 40), edge_probability(7, 3, 2.5, 40));
}

// ---- WeightedGraph and edge-list format ----

TEST(WeightedGraph, NormalisesAndValidates) {
    const WeightedGraph g(4, {}, {{2, 1}, {1, 2}, {0, 3}});
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_TRUE(g.has_edge(1, 2));
    EXPECT_TRUE(g.has_edge(2, 1));
    EXPECT_FALSE(g.has_edge(0, 1));
    EXPECT_EQ(g.degree(3), 1u);
    EXPECT_THROW(WeightedGraph(3, {}, {{1, 1}}), InvalidParameter);
    EXPECT_THROW(WeightedGraph(3, {}, {{0, 3}}), InvalidParameter);
    EXPECT_THROW(WeightedGraph(3, {1.0, 2.0}, {}), InvalidParameter);
}

TEST(EdgeList, BitExactRoundTrip) {
    const auto g = sample_graph(pareto(2.5), config(SamplerMethod::Auto, 3, 300, 1));
    std::stringstream ss;
    write_edge_list(ss, g, {"comment line"});
    std::string first;
    std::getline(ss, first);
    EXPECT_EQ(first, "n 300");
    ss.seekg(0);
    const auto back = read_edge_list(ss);
    EXPECT_EQ(back.node_count(), g.node_count());
    EXPECT_EQ(back.edges(), g.edges());
    ASSERT_EQ(back.weights().size(), g.weights().size());
    for (std::size_t i = 0; i < g.weights().size(); ++i) EXPECT_EQ(back.weights()[i], g.weights()[i]);
    std::stringstream again;
    write_edge_list(again, back, {"comment line"});
    std::stringstream orig;
    write_edge_list(orig, g, {"comment line"});
    EXPECT_EQ(again.str(), orig.str());
}

TEST(EdgeList, EdgesAreOrderedAndZeroIndexed) {
    const WeightedGraph g(3, {}, {{2, 0}, {1, 0}});
    std::stringstream ss;
    write_edge_list(ss, g);
    EXPECT_EQ(ss.str(), "n 3\nw 0 1\nw 1 1\nw 2 1\n0 1\n0 2\n");
}

TEST(EdgeList, RejectsMalformedInput) {
    std::stringstream a("3 4\n");
    EXPECT_THROW(read_edge_list(a), ParseError);
    std::stringstream b("n 3\n0 5\n");
    EXPECT_THROW(read_edge_list(b), std::exception);
    std::stringstream c("n 2\nw 0 abc\n");
    EXPECT_THROW(read_edge_list(c), ParseError);
}

// ---- sample_graph ----

TEST(SampleGraph, SingleNode) {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto g = sample_graph(pareto(3), config(SamplerMethod::Auto, seed, 1, 1));
        EXPECT_EQ(g.node_count(), 1u);
        EXPECT_EQ(g.edge_count(), 0u);
    }
}

TEST(SampleGraph, AtomWithUnitScaleAlwaysConnects) {
    // l = 0 puts all mass on h = 1; mu n = 0.5 * 2 = 1 forces p = 1.
    const TailDistribution atom(3, SlowlyVarying::constant(0.0), TailDistribution::Mode::Strict, 0.5);
    for (auto method : {SamplerMethod::Naive, SamplerMethod::Skip})
        for (std::uint64_t seed = 0; seed < 50; ++seed)
            EXPECT_EQ(sample_graph(atom, config(method, seed, 2, 1)).edge_count(), 1u);
}

TEST(SampleGraph, ZeroNodesRejected) {
    EXPECT_THROW(sample_graph(pareto(3), config(SamplerMethod::Auto, 1, 0, 1)), InvalidParameter);
}

TEST(SampleGraph, DeterministicAcrossThreadCounts) {
    for (auto method : {SamplerMethod::Naive, SamplerMethod::Skip}) {
        const auto a = sample_graph(pareto(2.5), config(method, 42, 2000, 1));
        const auto b = sample_graph(pareto(2.5), config(method, 42, 2000, 4));
        const auto c = sample_graph(pareto(2.5), config(method, 42, 2000, 1));
        EXPECT_TRUE(a == b);
        EXPECT_TRUE(a == c);
        const auto d = sample_graph(pareto(2.5), config(method, 43, 2000, 1));
        EXPECT_FALSE(a == d);
    }
}

TEST(SampleGraph, InvariantsHold) {
    const auto g = sample_graph(TailDistribution(2.3, SlowlyVarying::log_shifted()),
                                config(SamplerMethod::Skip, 9, 3000, 2));
    for (NodeId u = 0; u < g.node_count(); ++u) {
        EXPECT_GE(g.weights()[u], 1.0);
        for (NodeId v : g.neighbors(u)) {
            EXPECT_NE(u, v);
            EXPECT_TRUE(g.has_edge(v, u));
        }
    }
}

TEST(SampleGraph, MeanDegreeMatchesQuadrature) {
    const auto dist = pareto(2.5);
    const std::size_t n = 500;
    detail::Moments mom;
    for (std::uint64_t r = 0; r < 200; ++r) {
        const auto g = sample_graph(dist, config(SamplerMethod::Auto, derive_key(7, StreamRole::Replica, r), n, 1));
        mom.add(2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(n));
    }
    const double p = clique_prob_quadrature(dist, 2, static_cast<double>(n)).total;  // E min{H1 H2 / (mu n), 1}
    const double want = (n - 1) * p;
    EXPECT_LE(std::abs(mom.mean - want), 4 * mom.std_error()) << mom.mean << " vs " << want;
}

TEST(SampleGraph, ConditionalDegreeOfPinnedNode) {
    const auto dist = pareto(3.0);
    const std::size_t n = 400;
    const double D = dist.mu() * n, h = 15.0;  // h <= sqrt(mu n) ~ 28
    // E min{h H / D, 1} = (h / D) int_1^{D/h} x dF + Fbar(D/h)
    const double want = (n - 1) * (h / D * oracle::pareto_moment(3.0, 1.0, 1.0, D / h) + std::pow(D / h, -2.0));
    detail::Moments mom;
    for (std::uint64_t r = 0; r < 4000; ++r) {
        auto w = sample_weights(dist, n, derive_key(5, StreamRole::Replica, r));
        w[0] = h;
        const WeightedGraph g(n, w, sample_edges_naive(w, dist.mu(), derive_key(6, StreamRole::Replica, r)));
        mom.add(static_cast<double>(g.degree(0)));
    }
    EXPECT_LE(std::abs(mom.mean - want), 4 * mom.std_error()) << mom.mean << " vs " << want;
}

TEST(SampleGraph, DegreeSequenceLawInvariantUnderRelabelling) {
    const auto dist = pareto(2.5);
    const std::size_t n = 200;
    auto w = sample_weights(dist, n, 77);
    auto perm = w;
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(3));
    const int R = 2000;
    // Summary statistics of the sorted degree vector.
    std::vector<detail::Moments> a(3), b(3);
    auto summarise = [&](const std::vector<double>& weights, std::uint64_t seed, std::vector<detail::Moments>& out) {
        const WeightedGraph g(n, weights, sample_edges_naive(weights, dist.mu(), seed));
        std::vector<double> deg(n);
        for (NodeId u = 0; u < n; ++u) deg[u] = static_cast<double>(g.degree(u));
        std::sort(deg.begin(), deg.end());
        out[0].add(deg.back());
        out[1].add(deg[n / 2]);
        out[2].add(deg[n / 10]);
    };
    for (int r = 0; r < R; ++r) {
        summarise(w, derive_key(1, StreamRole::Replica, r), a);
        summarise(perm, derive_key(2, StreamRole::Replica, r), b);
    }
    for (int i = 0; i < 3; ++i) {
        const double se = std::hypot(a[i].std_error(), b[i].std_error());
        EXPECT_LE(std::abs(a[i].mean - b[i].mean), 4 * se + 1e-12) << "statistic " << i;
    }
}

TEST(SampleGraph, MemoryBudgetGivesResourceError) {
    SamplerConfig cfg;
    cfg.n = 100000;
    cfg.memory_budget_bytes = 1 << 20;
    try {
        sample_graph(pareto(2.5), cfg);
        FAIL() << "expected ResourceError";
    } catch (const ResourceError& e) {
        EXPECT_NE(std::string(e.what()).find("budget"), std::string::npos);
    }
}

// ---- skip sampler ----

TEST(SkipSampler, TwoNodeBernoulliLaw) {
    const std::vector<double> w = {2.0, 3.0};
    const double mu = 10.0;  // p = 6 / 20 = 0.3
    const int R = 20000;
    double naive = 0, skip = 0;
    for (int r = 0; r < R; ++r) {
        naive += !sample_edges_naive(w, mu, derive_key(1, StreamRole::Replica, r)).empty();
        skip += !sample_edges_skip(w, mu, derive_key(2, StreamRole::Replica, r)).empty();
    }
    const double sigma = std::sqrt(0.3 * 0.7 / R);
    EXPECT_LE(std::abs(naive / R - 0.3), 4 * sigma);
    EXPECT_LE(std::abs(skip / R - 0.3), 4 * sigma);
}

TEST(SkipSampler, AllPairMarginalsMatchExactProbabilities) {
    // Small n: every pair's frequency against its exact p, 4 binomial sigma.
    const std::size_t n = 40;
    auto w = sample_weights(pareto(2.2), n, 3);
    const double mu = 2.0;
    const int R = 20000;
    std::vector<double> hits(n * n, 0.0);
    for (int r = 0; r < R; ++r)
        for (auto [u, v] : sample_edges_skip(w, mu, derive_key(4, StreamRole::Replica, r))) hits[u * n + v] += 1;
    int outside = 0;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) {
            const double p = edge_probability(w[u], w[v], mu, static_cast<double>(n));
            const double sigma = std::sqrt(p * (1 - p) / R);
            if (std::abs(hits[u * n + v] / R - p) > 4 * sigma + 1e-12) ++outside;
        }
    EXPECT_EQ(outside, 0);
}

TEST(SkipSampler, EdgeCountMatchesExpectationAtLargeN) {
    const auto dist = pareto(2.5);
    const std::size_t n = 100000;
    const auto w = sample_weights(dist, n, 8);
    // sum_{i<j} p_ij: along a row of the descending order p hits 1 first, then
    // is linear in h_j, so suffix sums give each row exactly.
    auto sorted = w;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] + sorted[j];
    const double D = dist.mu() * n;
    double expected = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto first_linear = static_cast<std::size_t>(
            std::upper_bound(sorted.begin() + i + 1, sorted.end(), D / sorted[i], std::greater<>()) - sorted.begin());
        expected += static_cast<double>(first_linear - (i + 1)) + sorted[i] / D * suffix[first_linear];
    }
    const auto edges = sample_edges_skip(w, dist.mu(), 9);
    // Sum of independent Bernoullis: variance <= mean.
    EXPECT_LE(std::abs(static_cast<double>(edges.size()) - expected), 5 * std::sqrt(expected));
}

// Benchmark harness: skip is expected O(n + m) against O(n^2) for naive. Run at
// n = 3e4 so the naive side stays a few seconds on one core.
TEST(SkipSampler, FasterThanNaiveByTenfold) {
    const auto dist = pareto(2.5);
    const std::size_t n = 30000;
    const auto w = sample_weights(dist, n, 10);
    auto t0 = std::chrono::steady_clock::now();
    const auto naive = sample_edges_naive(w, dist.mu(), 1);
    const double t_naive = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const auto skip = sample_edges_skip(w, dist.mu(), 1);
    const double t_skip = seconds_since(t0);
    RecordProperty("naive_seconds", std::to_string(t_naive));
    RecordProperty("skip_seconds", std::to_string(t_skip));
    EXPECT_GT(t_naive / t_skip, 10.0) << "naive " << t_naive << " s, skip " << t_skip << " s";
    const double m = static_cast<double>(naive.size());
    EXPECT_LE(std::abs(static_cast<double>(skip.size()) - m), 6 * std::sqrt(m));
}
