#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace cliquescale {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// One sampled graph: node weights plus a symmetric, loop-free adjacency in
/// CSR form with each neighbour list sorted by id. Immutable once built.
class WeightedGraph {
public:
    WeightedGraph() = default;

    WeightedGraph(std::size_t n, std::vector<double> weights, std::vector<Edge> edges,
                  std::uint64_t seed = 0)
        : n_(n), weights_(std::move(weights)), seed_(seed) {
        if (weights_.empty()) weights_.assign(n_, 1.0);
        if (weights_.size() != n_) throw InvalidParameter("weight vector size differs from n");
        for (auto& [u, v] : edges) {
            if (u == v) throw InvalidParameter("self-loop at node " + std::to_string(u));
            if (u >= n_ || v >= n_) throw InvalidParameter("edge endpoint out of range");
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        edge_count_ = edges.size();

        offsets_.assign(n_ + 1, 0);
        for (const auto& [u, v] : edges) {
            ++offsets_[u + 1];
            ++offsets_[v + 1];
        }
        for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
        adjacency_.resize(offsets_[n_]);
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        // Edges are sorted by (u, v): emitting v into u's list keeps it sorted,
        // and u into v's list is sorted because u increases along the scan.
        for (const auto& [u, v] : edges) {
            adjacency_[fill[u]++] = v;
            adjacency_[fill[v]++] = u;
        }
        for (std::size_t i = 0; i < n_; ++i)
            std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1]);
    }

    std::size_t node_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edge_count_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::span<const double> weights() const noexcept { return weights_; }

    std::span<const NodeId> neighbors(NodeId v) const noexcept {
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }
    std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

    bool has_edge(NodeId u, NodeId v) const noexcept {
        if (u >= n_ || v >= n_) return false;
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    /// All edges as (u, v), u < v, in lexicographic order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (NodeId u = 0; u < n_; ++u)
            for (NodeId v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
        return a.n_ == b.n_ && a.weights_ == b.weights_ && a.offsets_ == b.offsets_ &&
               a.adjacency_ == b.adjacency_;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> weights_;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> adjacency_;
    std::size_t edge_count_ = 0;
    std::uint64_t seed_ = 0;
};

/// Shortest decimal form that parses back to exactly the same double.
inline std::string format_exact(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// Edge-list text: "n <count>", optional '#' comment lines, "w i value" lines,
/// then "u v" lines with u < v, 0-indexed.
inline void write_edge_list(std::ostream& os, const WeightedGraph& g,
                            const std::vector<std::string>& comments = {}) {
    os << "n " << g.node_count() << "\n";
    for (const auto& c : comments) os << "# " << c << "\n";
    const auto w = g.weights();
    for (std::size_t i = 0; i < w.size(); ++i) os << "w " << i << " " << format_exact(w[i]) << "\n";
    for (const auto& [u, v] : g.edges()) os << u << " " << v << "\n";
}

inline WeightedGraph read_edge_list(std::istream& is) {
    std::string line;
    std::size_t n = 0;
    bool have_n = false;
    std::vector<double> weights;
    std::vector<Edge> edges;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        auto fail = [&](const std::string& why) {
            return ParseError("edge list line " + std::to_string(lineno) + ": " + why);
        };
        if (!have_n) {
            std::string tag;
            if (!(ls >> tag >> n) || tag != "n") throw fail("expected header 'n <count>'");
            have_n = true;
            weights.assign(n, 1.0);
            continue;
        }
        if (line[0] == 'w') {
            std::string tag, value;
            std::size_t i = 0;
            if (!(ls >> tag >> i >> value) || i >= n) throw fail("bad weight line");
            double x = 0.0;
            auto res = std::from_chars(value.data(), value.data() + value.size(), x);
            if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) throw fail("bad weight value");
            weights[i] = x;
            continue;
        }
        long long u = -1, v = -1;
        if (!(ls >> u >> v) || u < 0 || v < 0 || static_cast<std::size_t>(u) >= n ||
            static_cast<std::size_t>(v) >= n || u == v)
            throw fail("bad edge");
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    if (!have_n) throw ParseError("edge list is empty (missing 'n <count>')");
    return WeightedGraph(n, std::move(weights), std::move(edges));
}

}  // namespace cliquescale
