#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "graph_sampler.hpp"
#include "parallel.hpp"

namespace cliquescale {

inline constexpr int kMaxCliqueSize = 12;

/// C(n, k) as a double (exact while below 2^53).
inline double binomial(double n, int k) noexcept {
    if (k < 0 || n < k) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r < 9007199254740992.0 ? std::round(r) : r;
}

struct CliqueCensus {
    int k = 0;
    std::uint64_t count = 0;
    std::uint64_t graph_seed = 0;
    double runtime_seconds = 0.0;
};

namespace detail {

// Forward (oriented) adjacency after relabelling nodes by rank of (degree, id).
struct OrientedGraph {
    std::vector<std::size_t> offsets;
    std::vector<NodeId> targets;  // ranks, ascending within each list

    std::span<const NodeId> out(NodeId r) const noexcept {
        return {targets.data() + offsets[r], targets.data() + offsets[r + 1]};
    }
};

inline OrientedGraph orient_by_degree(const WeightedGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        const auto da = g.degree(a), db = g.degree(b);
        return da != db ? da < db : a < b;
    });
    std::vector<NodeId> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<NodeId>(r);

    OrientedGraph og;
    og.offsets.assign(n + 1, 0);
    for (std::size_t r = 0; r < n; ++r) {
        const NodeId u = order[r];
        std::size_t forward = 0;
        for (NodeId v : g.neighbors(u)) forward += rank[v] > r;
        og.offsets[r + 1] = og.offsets[r] + forward;
    }
    og.targets.resize(og.offsets[n]);
    for (std::size_t r = 0; r < n; ++r) {
        auto* dst = og.targets.data() + og.offsets[r];
        for (NodeId v : g.neighbors(order[r]))
            if (rank[v] > r) *dst++ = rank[v];
        std::sort(og.targets.data() + og.offsets[r], dst);
    }
    return og;
}

class CliqueCounter {
public:
    CliqueCounter(const OrientedGraph& og, int k) : og_(og), k_(k), buffers_(static_cast<std::size_t>(k)) {}

    std::uint64_t count_from(NodeId root) {
        auto out = og_.out(root);
        return extend(out, k_ - 1, 0);
    }

private:
    // Number of (remaining)-cliques inside cand, all ranks above the prefix.
    std::uint64_t extend(std::span<const NodeId> cand, int remaining, std::size_t depth) {
        if (remaining == 1) return cand.size();
        if (cand.size() < static_cast<std::size_t>(remaining)) return 0;
        std::uint64_t total = 0;
        auto& next = buffers_[depth];
        for (NodeId v : cand) {
            next.clear();
            auto out = og_.out(v);
            std::set_intersection(cand.begin(), cand.end(), out.begin(), out.end(),
                                  std::back_inserter(next));
            if (next.size() >= static_cast<std::size_t>(remaining - 1))
                total += extend(next, remaining - 1, depth + 1);
        }
        return total;
    }

    const OrientedGraph& og_;
    int k_;
    std::vector<std::vector<NodeId>> buffers_;
};

}  // namespace detail

/// Exact number of k-vertex complete subgraphs. Edges are oriented from lower
/// to higher (degree, id) rank and k-cliques counted by recursive intersection
/// of forward neighbourhoods; memory is O(n + m + k * max out-degree).
inline CliqueCensus count_cliques(const WeightedGraph& g, int k, unsigned threads = 1) {
    if (k < 1) throw DomainError("clique size k must be >= 1");
    if (k > kMaxCliqueSize) throw InvalidParameter("clique size k is capped at 12");
    const auto start = std::chrono::steady_clock::now();
    CliqueCensus census;
    census.k = k;
    census.graph_seed = g.seed();
    const std::size_t n = g.node_count();
    if (static_cast<std::size_t>(k) > n) {
        census.count = 0;
    } else if (k == 1) {
        census.count = n;
    } else if (k == 2) {
        census.count = g.edge_count();
    } else {
        const auto og = detail::orient_by_degree(g);
        const unsigned workers = std::min<unsigned>(resolve_threads(threads), std::max<std::size_t>(n, 1));
        // Roots are split into contiguous blocks; block sums are added in order.
        const std::size_t blocks = std::max<std::size_t>(1, std::min<std::size_t>(n, 64 * workers));
        std::vector<std::uint64_t> partial(blocks, 0);
        parallel_for(blocks, workers, [&](std::size_t b) {
            detail::CliqueCounter counter(og, k);
            const std::size_t lo = n * b / blocks, hi = n * (b + 1) / blocks;
            std::uint64_t s = 0;
            for (std::size_t r = lo; r < hi; ++r) s += counter.count_from(static_cast<NodeId>(r));
            partial[b] = s;
        });
        census.count = std::accumulate(partial.begin(), partial.end(), std::uint64_t{0});
    }
    census.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return census;
}

inline constexpr double kEnumerationLimit = 1e7;

namespace detail {

// Calls f(indices) for every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, int k, F&& f) {
    if (k < 0 || static_cast<std::size_t>(k) > n) return;
    std::vector<std::size_t> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (k == 0) {
        f(std::span<const std::size_t>(idx));
        return;
    }
    while (true) {
        f(std::span<const std::size_t>(idx));
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - static_cast<std::size_t>(k - i)) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

}  // namespace detail

/// Test oracle: enumerate every k-subset and check all of its pairs.
inline std::uint64_t brute_force_count(const WeightedGraph& g, int k) {
    if (k < 1) throw DomainError("clique size k must be >= 1");
    const std::size_t n = g.node_count();
    if (binomial(static_cast<double>(n), k) > kEnumerationLimit)
        throw ResourceError("brute force needs C(n, k) <= 1e7 subsets");
    std::vector<char> adj(n * n, 0);
    for (const auto& [u, v] : g.edges()) adj[u * n + v] = adj[v * n + u] = 1;
    std::uint64_t count = 0;
    detail::for_each_subset(n, k, [&](std::span<const std::size_t> s) {
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = a + 1; b < s.size(); ++b)
                if (!adj[s[a] * n + s[b]]) return;
        ++count;
    });
    return count;
}

/// E[#k-cliques | weights] = sum over k-subsets of prod_{pairs} p_ij.
inline double expected_cliques_given_weights(std::span<const double> weights, double mu, double n,
                                             int k) {
    if (k < 1) throw DomainError("clique size k must be >= 1");
    const std::size_t size = weights.size();
    if (binomial(static_cast<double>(size), k) > kEnumerationLimit)
        throw ResourceError("expected clique enumeration needs C(n, k) <= 1e7 subsets");
    std::vector<double> p(size * size, 0.0);
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) p[i * size + j] = edge_probability(weights[i], weights[j], mu, n);
    // Neumaier summation.
    double sum = 0.0, comp = 0.0;
    detail::for_each_subset(size, k, [&](std::span<const std::size_t> s) {
        double prod = 1.0;
        for (std::size_t a = 0; a < s.size(); ++a)
            for (std::size_t b = a + 1; b < s.size(); ++b) prod *= p[s[a] * size + s[b]];
        const double t = sum + prod;
        comp += std::abs(sum) >= std::abs(prod) ? (sum - t) + prod : (prod - t) + sum;
        sum = t;
    });
    return sum + comp;
}

}  // namespace cliquescale
