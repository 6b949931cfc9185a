#include "signrev/overlap_graph.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace signrev {

OverlapGraph::OverlapGraph(std::size_t vertices)
    : words_((vertices + 63) / 64), rows_(vertices * words_, 0), good_(vertices, false) {}

bool OverlapGraph::edge(Vertex u, Vertex v) const {
    return (rows_[u * words_ + v / 64] >> (v % 64)) & 1u;
}

void OverlapGraph::set_edge(Vertex u, Vertex v, bool present) {
    if (u == v) return;
    const std::uint64_t bu = std::uint64_t{1} << (u % 64);
    const std::uint64_t bv = std::uint64_t{1} << (v % 64);
    if (present) {
        rows_[u * words_ + v / 64] |= bv;
        rows_[v * words_ + u / 64] |= bu;
    } else {
        rows_[u * words_ + v / 64] &= ~bv;
        rows_[v * words_ + u / 64] &= ~bu;
    }
}

std::vector<Vertex> OverlapGraph::neighbors(Vertex v) const {
    std::vector<Vertex> out;
    for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t bits = rows_[v * words_ + w];
        while (bits != 0) {
            const int b = __builtin_ctzll(bits);
            out.push_back(w * 64 + static_cast<std::size_t>(b));
            bits &= bits - 1;
        }
    }
    return out;
}

std::size_t OverlapGraph::degree(Vertex v) const {
    std::size_t d = 0;
    for (std::size_t w = 0; w < words_; ++w) d += static_cast<std::size_t>(__builtin_popcountll(rows_[v * words_ + w]));
    return d;
}

OverlapGraph OverlapGraph::build(const SignedPermutation& p) {
    const std::size_t n = p.size();
    // Two points per position; a negative element lists its + point first.
    std::vector<std::size_t> plus(n + 2), minus(n + 2);
    const auto e = p.elements();
    for (std::size_t k = 0; k < e.size(); ++k) {
        const auto m = static_cast<std::size_t>(e[k] < 0 ? -e[k] : e[k]);
        if (e[k] < 0) {
            plus[m] = 2 * k;
            minus[m] = 2 * k + 1;
        } else {
            minus[m] = 2 * k;
            plus[m] = 2 * k + 1;
        }
    }
    OverlapGraph g(n + 1);
    std::vector<std::pair<std::size_t, std::size_t>> span(n + 1);
    for (std::size_t q = 0; q <= n; ++q) {
        span[q] = std::minmax(plus[q], minus[q + 1]);
    }
    const auto pos = p.positions();
    for (std::size_t q = 0; q <= n; ++q) g.good_[q] = (e[pos[q]] < 0) != (e[pos[q + 1]] < 0);
    for (std::size_t u = 0; u <= n; ++u) {
        for (std::size_t v = u + 1; v <= n; ++v) {
            const auto [a, b] = span[u];
            const auto [c, d] = span[v];
            const bool cross = (a < c && c < b && b < d) || (c < a && a < d && d < b);
            if (cross) g.set_edge(u, v, true);
        }
    }
    return g;
}

OverlapGraph OverlapGraph::complement(Vertex v) const {
    OverlapGraph out = *this;
    out.complement_in_place(v);
    return out;
}

std::vector<Vertex> OverlapGraph::complement_in_place(Vertex v) {
    if (v >= size() || !good_[v]) throw std::invalid_argument("vertex " + std::to_string(v) + " is not good");
    std::vector<Vertex> w = neighbors(v);
    w.push_back(v);
    std::sort(w.begin(), w.end());
    uncomplement(w);
    return w;
}

void OverlapGraph::uncomplement(const std::vector<Vertex>& closed_neighborhood) {
    const auto& w = closed_neighborhood;
    for (std::size_t a = 0; a < w.size(); ++a) {
        good_[w[a]] = !good_[w[a]];
        for (std::size_t b = a + 1; b < w.size(); ++b) set_edge(w[a], w[b], !edge(w[a], w[b]));
    }
}

std::vector<std::vector<Vertex>> OverlapGraph::components(const VertexSet& within) const {
    const std::size_t n = size();
    auto inside = [&](Vertex v) { return within.empty() || within[v]; };
    std::vector<bool> seen(n, false);
    std::vector<std::vector<Vertex>> out;
    for (Vertex s = 0; s < n; ++s) {
        if (seen[s] || !inside(s)) continue;
        std::vector<Vertex> comp{s};
        seen[s] = true;
        for (std::size_t k = 0; k < comp.size(); ++k) {
            for (Vertex u : neighbors(comp[k])) {
                if (!seen[u] && inside(u)) {
                    seen[u] = true;
                    comp.push_back(u);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

bool OverlapGraph::has_good_in(const VertexSet& within) const {
    for (Vertex v = 0; v < size(); ++v)
        if (within[v] && good_[v]) return true;
    return false;
}

OverlapGraph OverlapGraph::induced(const VertexSet& keep) const {
    std::vector<Vertex> kept;
    for (Vertex v = 0; v < size(); ++v)
        if (keep[v]) kept.push_back(v);
    OverlapGraph out(kept.size());
    for (std::size_t a = 0; a < kept.size(); ++a) {
        out.good_[a] = good_[kept[a]];
        for (std::size_t b = a + 1; b < kept.size(); ++b)
            if (edge(kept[a], kept[b])) out.set_edge(a, b, true);
    }
    return out;
}

std::string OverlapGraph::to_dot() const {
    std::ostringstream out;
    out << "graph overlap {\n";
    for (Vertex v = 0; v < size(); ++v) {
        out << "  " << v << (good_[v] ? " [style=filled, fillcolor=black, fontcolor=white];\n" : ";\n");
    }
    for (Vertex u = 0; u < size(); ++u)
        for (Vertex v : neighbors(u))
            if (u < v) out << "  " << u << " -- " << v << ";\n";
    out << "}\n";
    return out.str();
}

namespace {

VertexSet as_set(std::size_t n, const std::vector<Vertex>& vs) {
    VertexSet out(n, false);
    for (Vertex v : vs) out[v] = true;
    return out;
}

}  // namespace

SplitAnalysis analyze_split(const OverlapGraph& h, Vertex v) {
    if (v >= h.size() || !h.good(v)) throw std::invalid_argument("vertex " + std::to_string(v) + " is not good");
    const std::size_t n = h.size();
    std::vector<Vertex> home;
    for (const auto& comp : h.components()) {
        if (std::binary_search(comp.begin(), comp.end(), v)) home = comp;
    }
    VertexSet rest = as_set(n, home);
    rest[v] = false;
    const VertexSet nv = as_set(n, h.neighbors(v));

    const OverlapGraph after = h.complement(v);
    const auto parts = after.components(rest);

    auto fail = [v](const std::string& what) {
        throw std::logic_error("split at vertex " + std::to_string(v) + ": " + what);
    };
    // Across parts: every N(v) vertex pair joined, every non-N(v) pair apart.
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::size_t j = i + 1; j < parts.size(); ++j) {
            for (Vertex a : parts[i]) {
                for (Vertex b : parts[j]) {
                    if (nv[a] && nv[b] && !h.edge(a, b)) fail("missing edge between neighbours");
                    if (!nv[a] && !nv[b] && h.edge(a, b)) fail("edge between non-neighbours");
                }
            }
        }
    }

    SplitAnalysis out;
    for (const auto& part : parts) {
        // An isolated bad vertex is sorted, not a bad component.
        const bool all_bad =
            part.size() > 1 && std::none_of(part.begin(), part.end(), [&](Vertex u) { return after.good(u); });
        auto& target = all_bad ? out.bad : out.good;
        target.insert(target.end(), part.begin(), part.end());
        if (all_bad) {
            for (Vertex u : part) {
                if (h.good(u) != nv[u]) fail("vertex " + std::to_string(u) + " of a bad part has the wrong colour");
            }
        }
    }
    std::sort(out.bad.begin(), out.bad.end());
    std::sort(out.good.begin(), out.good.end());
    for (Vertex u : out.good)
        if (nv[u]) out.x.push_back(u);
    out.x.push_back(v);
    std::sort(out.x.begin(), out.x.end());
    return out;
}

namespace {

struct Step {
    Vertex vertex;
    std::vector<Vertex> closed_neighborhood;
};

class GraphSorter {
public:
    GraphSorter(const OverlapGraph& h, VertexSet q, GraphSortOptions options)
        : g_(h), q_(std::move(q)), options_(options) {}

    GraphSortResult run() {
        std::vector<Vertex> seq = sort();
        // The working graph is back at its entry state; replay for the result.
        OverlapGraph final_graph = g_;
        for (Vertex v : seq) final_graph.complement_in_place(v);
        return {std::move(seq), std::move(final_graph), recursions_};
    }

private:
    std::optional<Vertex> lowest_good() const {
        for (Vertex v = 0; v < g_.size(); ++v)
            if (q_[v] && g_.good(v)) return v;
        return std::nullopt;
    }

    bool isolated_in_q(Vertex v) const {
        for (Vertex u : g_.neighbors(v))
            if (q_[u]) return false;
        return true;
    }

    std::vector<Step> do_good() {
        std::vector<Step> s;
        while (const auto v = lowest_good()) {
            s.push_back({*v, g_.complement_in_place(*v)});
            for (Vertex u = 0; u < g_.size(); ++u)
                if (q_[u] && !g_.good(u) && isolated_in_q(u)) q_[u] = false;
        }
        return s;
    }

    void undo(const Step& step) { g_.uncomplement(step.closed_neighborhood); }

    // Recovers the graph of the first element of s2 and compares the
    // restriction to G + v of both routes.
    void check_preserved(const OverlapGraph& before, Vertex v, const std::vector<Vertex>& inserted) {
        const SplitAnalysis split = analyze_split(before, v);
        VertexSet keep(before.size(), false);
        for (Vertex u : split.good) keep[u] = true;
        keep[v] = true;
        for (Vertex u : inserted) {
            if (!std::binary_search(split.bad.begin(), split.bad.end(), u)) {
                throw std::logic_error("inserted vertex " + std::to_string(u) + " outside the bad side");
            }
        }
        OverlapGraph via = before;
        for (Vertex u : inserted) via.complement_in_place(u);
        if (inserted.size() % 2 == 0) via.complement_in_place(v);
        if (!(before.complement(v).induced(keep) == via.induced(keep))) {
            throw std::logic_error("good side changed by inserted sequence before vertex " + std::to_string(v));
        }
    }

    std::vector<Vertex> sort() {
        std::vector<Step> front = do_good();
        std::vector<Vertex> back;
        while (!front.empty()) {
            std::vector<Vertex> s2;
            while (!front.empty() && !g_.has_good_in(q_)) {
                undo(front.back());
                s2.insert(s2.begin(), front.back().vertex);
                front.pop_back();
            }
            const std::optional<OverlapGraph> before =
                options_.checks && !s2.empty() ? std::optional<OverlapGraph>(g_) : std::nullopt;
            ++recursions_;
            std::vector<Vertex> inserted = sort();
            if (before && !inserted.empty()) check_preserved(*before, s2.front(), inserted);
            std::vector<Vertex> next = inserted;
            const std::size_t drop = (inserted.size() % 2 == 1 && !s2.empty()) ? 1 : 0;
            next.insert(next.end(), s2.begin() + static_cast<std::ptrdiff_t>(drop), s2.end());
            next.insert(next.end(), back.begin(), back.end());
            back = std::move(next);
        }
        return back;
    }

    OverlapGraph g_;
    VertexSet q_;
    GraphSortOptions options_;
    std::size_t recursions_ = 0;
};

}  // namespace

GraphSortResult sort_graph(const OverlapGraph& h, VertexSet q, GraphSortOptions options) {
    if (q.size() != h.size()) throw std::invalid_argument("vertex set sized for a different graph");
    return GraphSorter(h, std::move(q), options).run();
}

GraphSortResult sort_graph(const OverlapGraph& h, GraphSortOptions options) {
    return sort_graph(h, VertexSet(h.size(), true), options);
}

}  // namespace signrev
