#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "signrev/permutation.hpp"

namespace signrev {

using Vertex = std::size_t;
using VertexSet = std::vector<bool>;

/// Two-colored graph with dense bit rows. In an overlap graph vertex q stands
/// for the pair (q, q+1) and is good when that pair is good.
class OverlapGraph {
public:
    OverlapGraph() = default;
    /// Edgeless graph with every vertex bad.
    explicit OverlapGraph(std::size_t vertices);

    static OverlapGraph build(const SignedPermutation& p);

    std::size_t size() const { return good_.size(); }
    bool good(Vertex v) const { return good_[v]; }
    void set_good(Vertex v, bool good) { good_[v] = good; }
    bool edge(Vertex u, Vertex v) const;
    void set_edge(Vertex u, Vertex v, bool present);
    std::vector<Vertex> neighbors(Vertex v) const;
    std::size_t degree(Vertex v) const;

    /// Local complementation at a good vertex; throws std::invalid_argument
    /// when v is bad.
    OverlapGraph complement(Vertex v) const;
    /// Same, in place; returns N(v) + {v} so the step can be undone.
    std::vector<Vertex> complement_in_place(Vertex v);
    /// Reverts a complementation given the set it returned.
    void uncomplement(const std::vector<Vertex>& closed_neighborhood);

    /// Connected components of the subgraph induced by `within` (every vertex
    /// when empty), each sorted, ordered by smallest vertex.
    std::vector<std::vector<Vertex>> components(const VertexSet& within = {}) const;
    bool has_good_in(const VertexSet& within) const;
    /// Subgraph induced by `keep`, with vertices renumbered in increasing order.
    OverlapGraph induced(const VertexSet& keep) const;

    std::string to_dot() const;

    friend bool operator==(const OverlapGraph&, const OverlapGraph&) = default;

private:
    std::size_t words_ = 0;
    std::vector<std::uint64_t> rows_;
    std::vector<bool> good_;
};

/// Vertex q of the overlap graph for the pair (|lo|, |lo|+1).
inline Vertex vertex_of(const IdentityPair& pair) { return static_cast<Vertex>(pair.index()); }

/// Effect of complementing v, restricted to v's component: B holds the
/// vertices other than v in all-bad components of H/v with two or more
/// vertices, G the rest, X = (G and N(v)) + v. Throws std::logic_error if the
/// component structure around v breaks the split conditions.
struct SplitAnalysis {
    std::vector<Vertex> bad;
    std::vector<Vertex> good;
    std::vector<Vertex> x;
};

SplitAnalysis analyze_split(const OverlapGraph& h, Vertex v);

struct GraphSortOptions {
    /// Verify the restriction equalities at every recovery (costly).
    bool checks = false;
};

struct GraphSortResult {
    std::vector<Vertex> sequence;
    OverlapGraph final_graph;
    std::size_t recursions = 0;
};

/// Sorts the good components of h[q] by local complementations of good
/// vertices, backtracking over unsafe complementations.
GraphSortResult sort_graph(const OverlapGraph& h, VertexSet q, GraphSortOptions options = {});
GraphSortResult sort_graph(const OverlapGraph& h, GraphSortOptions options = {});

}  // namespace signrev
