#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "weight_model.hpp"

namespace cliquescale {

/// p_ij = min{h_i h_j / (mu n), 1}.
inline double edge_probability(double hi, double hj, double mu, double n) noexcept {
    return std::min(hi * hj / (mu * n), 1.0);
}

enum class SamplerMethod { Auto, Naive, Skip };

struct SamplerConfig {
    SamplerMethod method = SamplerMethod::Auto;
    std::uint64_t seed = 1;
    std::size_t n = 1;
    unsigned threads = 1;
    double memory_budget_bytes = 8.0 * (1ull << 30);
};

/// Naive is the reference path; above this size Auto switches to Skip.
inline constexpr std::size_t kNaiveLimit = 10'000;

inline SamplerMethod resolve_method(SamplerMethod m, std::size_t n) noexcept {
    if (m != SamplerMethod::Auto) return m;
    return n <= kNaiveLimit ? SamplerMethod::Naive : SamplerMethod::Skip;
}

namespace detail {

inline void check_budget(std::size_t n, std::span<const double> weights, double mu,
                         double budget) {
    if (n > 0xFFFFFFFFull) throw ResourceError("n exceeds 32-bit node ids");
    // E[#edges] <= sum_{i<j} h_i h_j / (mu n) <= (sum h)^2 / (2 mu n).
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double expected_edges = std::min(total * total / (2.0 * mu * static_cast<double>(n)),
                                           0.5 * static_cast<double>(n) * static_cast<double>(n));
    // Edge list during construction plus CSR arrays, with slack.
    const double bytes = 1.5 * expected_edges * 24.0 + static_cast<double>(n) * 24.0;
    if (bytes > budget)
        throw ResourceError("sampling n = " + std::to_string(n) + " needs about " +
                            std::to_string(static_cast<long long>(bytes / (1 << 20))) +
                            " MiB (budget " +
                            std::to_string(static_cast<long long>(budget / (1 << 20))) +
                            " MiB); reduce n or raise the memory budget");
}

inline std::vector<Edge> concat_rows(std::vector<std::vector<Edge>>& rows) {
    std::size_t total = 0;
    for (const auto& r : rows) total += r.size();
    std::vector<Edge> out;
    out.reserve(total);
    for (auto& r : rows) {
        out.insert(out.end(), r.begin(), r.end());
        r.clear();
        r.shrink_to_fit();
    }
    return out;
}

}  // namespace detail

/// Every pair tested independently. Row i draws from substream (seed, EdgeRow, i).
inline std::vector<Edge> sample_edges_naive(std::span<const double> weights, double mu,
                                            std::uint64_t seed, unsigned threads = 1) {
    const std::size_t n = weights.size();
    const double scale = 1.0 / (mu * static_cast<double>(n));
    std::vector<std::vector<Edge>> rows(n);
    parallel_for(n, threads, [&](std::size_t i) {
        Stream rng(seed, StreamRole::EdgeRow, i);
        const double hi = weights[i] * scale;
        auto& row = rows[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = std::min(hi * weights[j], 1.0);
            if (rng.uniform() < p) row.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
        }
    });
    return detail::concat_rows(rows);
}

/// Exact geometric-skip sampler. Nodes are visited by decreasing weight; for a
/// row, the probability bound pbar only decreases along the row, so gaps are
/// drawn from Geometric(pbar) and candidates thinned with p/pbar.
inline std::vector<Edge> sample_edges_skip(std::span<const double> weights, double mu,
                                           std::uint64_t seed, unsigned threads = 1) {
    const std::size_t n = weights.size();
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return weights[a] > weights[b]; });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = weights[order[i]];
    const double scale = 1.0 / (mu * static_cast<double>(n));

    std::vector<std::vector<Edge>> rows(n);
    parallel_for(n, threads, [&](std::size_t a) {
        Stream rng(seed, StreamRole::SkipRow, a);
        const double hi = sorted[a] * scale;
        auto& row = rows[a];
        std::size_t j = a + 1;
        if (j >= n) return;
        double bound = std::min(hi * sorted[j], 1.0);
        while (j < n && bound > 0.0) {
            if (bound < 1.0) {
                const double gap = std::floor(std::log(rng.uniform_open_closed()) / std::log1p(-bound));
                if (gap >= static_cast<double>(n - j)) break;
                j += static_cast<std::size_t>(gap);
            }
            const double p = std::min(hi * sorted[j], 1.0);
            if (rng.uniform() * bound < p) {
                NodeId u = order[a], v = order[j];
                if (u > v) std::swap(u, v);
                row.emplace_back(u, v);
            }
            bound = p;
            ++j;
        }
    });
    return detail::concat_rows(rows);
}

/// Edges for a fixed weight vector with the chosen method.
inline WeightedGraph sample_graph_given_weights(std::vector<double> weights, double mu,
                                                const SamplerConfig& config) {
    const std::size_t n = weights.size();
    detail::check_budget(n, weights, mu, config.memory_budget_bytes);
    auto edges = resolve_method(config.method, n) == SamplerMethod::Skip
                     ? sample_edges_skip(weights, mu, config.seed, config.threads)
                     : sample_edges_naive(weights, mu, config.seed, config.threads);
    return WeightedGraph(n, std::move(weights), std::move(edges), config.seed);
}

inline WeightedGraph sample_graph(const TailDistribution& dist, const SamplerConfig& config) {
    if (config.n < 1) throw InvalidParameter("graph size n must be >= 1");
    if (!dist.valid_tail()) throw UnsupportedSampling("cannot sample graphs from a formal tail");
    detail::check_budget(config.n, std::vector<double>(1, dist.mean() * config.n), dist.mu(),
                         config.memory_budget_bytes);
    return sample_graph_given_weights(sample_weights(dist, config.n, config.seed), dist.mu(), config);
}

inline WeightedGraph sample_graph_naive(const TailDistribution& dist, SamplerConfig config) {
    config.method = SamplerMethod::Naive;
    return sample_graph(dist, config);
}

inline WeightedGraph sample_graph_skip(const TailDistribution& dist, SamplerConfig config) {
    config.method = SamplerMethod::Skip;
    return sample_graph(dist, config);
}

}  // namespace cliquescale
