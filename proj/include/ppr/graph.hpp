#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppr/sparse_vector.hpp"

namespace ppr {

// Malformed edge-list input; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Immutable directed graph in compressed adjacency form. Vertex ids are
// dense in [0, N); out-neighbor lists are sorted ascending (parallel edges
// and self-loops are preserved). Safe for unrestricted concurrent reads.
class Graph {
public:
    Graph() = default;

    // Builds from an edge list. Ids are taken verbatim: N = max id + 1, and
    // id gaps become isolated dangling vertices.
    static Graph from_edges(std::vector<std::pair<VertexId, VertexId>> edges,
                            VertexId min_vertices = 0) {
        VertexId n = min_vertices;
        for (const auto& [s, t] : edges) n = std::max({n, s + 1, t + 1});

        Graph g;
        g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (const auto& [s, t] : edges) ++g.offsets_[s + 1];
        for (std::size_t v = 1; v <= n; ++v) g.offsets_[v] += g.offsets_[v - 1];

        g.targets_.resize(edges.size());
        std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (const auto& [s, t] : edges) g.targets_[cursor[s]++] = t;
        for (VertexId v = 0; v < n; ++v) {
            std::sort(g.targets_.begin() + g.offsets_[v], g.targets_.begin() + g.offsets_[v + 1]);
            if (g.offsets_[v] == g.offsets_[v + 1]) g.dangling_.push_back(v);
        }
        return g;
    }

    // Parses the SNAP text format: '#' comment lines, whitespace-separated
    // "<src> <dst>" pairs, LF or CRLF endings. Duplicate edges and self-loops
    // are kept.
    static Graph load_edge_list(std::istream& in) {
        std::vector<std::pair<VertexId, VertexId>> edges;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t pos = line.find_first_not_of(" \t");
            if (pos == std::string::npos || line[pos] == '#') continue;
            VertexId src = parse_id(line, pos, lineno);
            VertexId dst = parse_id(line, pos, lineno);
            pos = line.find_first_not_of(" \t", pos);
            if (pos != std::string::npos)
                throw ParseError(lineno, "trailing tokens after edge pair");
            edges.emplace_back(src, dst);
        }
        return from_edges(std::move(edges));
    }

    VertexId num_vertices() const { return static_cast<VertexId>(offsets_.size() - (offsets_.empty() ? 0 : 1)); }
    std::uint64_t num_edges() const { return targets_.size(); }

    std::span<const VertexId> out_neighbors(VertexId u) const {
        check_vertex(u);
        return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
    }

    std::uint32_t out_degree(VertexId u) const {
        check_vertex(u);
        return static_cast<std::uint32_t>(offsets_[u + 1] - offsets_[u]);
    }

    bool is_dangling(VertexId u) const { return out_degree(u) == 0; }

    // Vertices with out-degree 0, ascending.
    const std::vector<VertexId>& dangling_vertices() const { return dangling_; }

    void check_vertex(VertexId u) const {
        if (u >= num_vertices())
            throw std::out_of_range("vertex " + std::to_string(u) + " >= N=" +
                                    std::to_string(num_vertices()));
    }

    // Writes one "src dst" line per edge (source-major, targets ascending).
    void write_edge_list(std::ostream& out) const {
        for (VertexId u = 0; u < num_vertices(); ++u)
            for (VertexId v : out_neighbors(u)) out << u << ' ' << v << '\n';
    }

private:
    static VertexId parse_id(const std::string& line, std::size_t& pos, std::size_t lineno) {
        pos = line.find_first_not_of(" \t", pos);
        if (pos == std::string::npos) throw ParseError(lineno, "expected vertex id");
        if (line[pos] == '-') throw ParseError(lineno, "negative vertex id");
        std::uint64_t value = 0;
        std::size_t start = pos;
        while (pos < line.size() && line[pos] >= '0' && line[pos] <= '9') {
            value = value * 10 + (line[pos] - '0');
            if (value > std::numeric_limits<VertexId>::max() - 1)
                throw ParseError(lineno, "vertex id out of range");
            ++pos;
        }
        if (pos == start || (pos < line.size() && line[pos] != ' ' && line[pos] != '\t'))
            throw ParseError(lineno, "malformed token '" + line.substr(start, 16) + "'");
        return static_cast<VertexId>(value);
    }

    std::vector<std::uint64_t> offsets_;  // size N+1
    std::vector<VertexId> targets_;       // size M, sorted within each row
    std::vector<VertexId> dangling_;
};

// Power-of-two out-degree bucket: bucket i covers degrees [2^(i-1), 2^i) for
// i < B, bucket B covers [2^(B-1), inf). Degree-0 vertices fall below the
// first bucket and get nullopt.
inline std::optional<int> degree_bucket(const Graph& g, VertexId u, int num_buckets) {
    if (num_buckets < 1) throw std::invalid_argument("num_buckets must be >= 1");
    std::uint32_t d = g.out_degree(u);
    if (d == 0) return std::nullopt;
    int i = 1;
    while (d >= 2u && i < num_buckets) {
        d >>= 1;
        ++i;
    }
    return i;
}

} // namespace ppr
