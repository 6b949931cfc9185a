#pragma once

// Randomized trials shared by the unit tests and the acceptance runner.
// Each trial returns an empty string on success, or what went wrong.

#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "signrev/components.hpp"
#include "signrev/overlap_graph.hpp"
#include "signrev/reversal_tree.hpp"
#include "signrev/solver.hpp"
#include "support.hpp"

namespace props {

using namespace signrev;
using oracle::Seq;

inline Element mag(Element x) { return x < 0 ? -x : x; }

inline Seq random_bad_free(std::mt19937_64& rng, std::size_t n) {
    while (true) {
        Seq v = oracle::random_signed(rng, n);
        if (!has_bad_component(oracle::make(v))) return v;
    }
}

// Dense graph used as the complementation oracle.
struct Dense {
    std::vector<std::vector<bool>> adj;
    std::vector<bool> good;

    explicit Dense(const OverlapGraph& g) : adj(g.size(), std::vector<bool>(g.size())), good(g.size()) {
        for (Vertex u = 0; u < g.size(); ++u) {
            good[u] = g.good(u);
            for (Vertex v = 0; v < g.size(); ++v) adj[u][v] = g.edge(u, v);
        }
    }

    void complement(Vertex v) {
        std::vector<Vertex> w{v};
        for (Vertex u = 0; u < adj.size(); ++u)
            if (adj[v][u]) w.push_back(u);
        for (std::size_t a = 0; a < w.size(); ++a) {
            good[w[a]] = !good[w[a]];
            for (std::size_t b = a + 1; b < w.size(); ++b) {
                adj[w[a]][w[b]] = !adj[w[a]][w[b]];
                adj[w[b]][w[a]] = !adj[w[b]][w[a]];
            }
        }
    }

    bool same_as(const OverlapGraph& g) const {
        for (Vertex u = 0; u < adj.size(); ++u) {
            if (good[u] != g.good(u)) return false;
            for (Vertex v = 0; v < adj.size(); ++v)
                if (adj[u][v] != g.edge(u, v)) return false;
        }
        return true;
    }
};

inline std::string seq_text(const Seq& v) {
    std::ostringstream out;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) out << (k > 1 ? " " : "") << v[k];
    return out.str();
}

struct SplitCounts {
    std::size_t splits = 0;        // analyze_split calls (partition checked inside)
    std::size_t unsafe = 0;        // of those with a nonempty bad side
    std::size_t good_in_b = 0;     // good u in B examined
    std::size_t sequences = 0;     // random good sequences drawn from B
    std::size_t even_sequences = 0;
};

// One random overlap graph: every good vertex split (the split's own
// partition checks run inside analyze_split), then on each unsafe vertex:
// B keeps a good vertex, X neighbourhoods hold, restrictions stay equal.
inline std::string split_trial(std::mt19937_64& rng, SplitCounts& counts) {
    const std::size_t n = 2 + rng() % 13;
    const Seq v = oracle::random_signed(rng, n);
    const OverlapGraph h = OverlapGraph::build(oracle::make(v));
    for (Vertex x = 0; x < h.size(); ++x) {
        if (!h.good(x)) continue;
        SplitAnalysis s;
        try {
            s = analyze_split(h, x);
        } catch (const std::logic_error& e) {
            return seq_text(v) + ": " + e.what();
        }
        ++counts.splits;
        if (s.bad.empty()) continue;
        ++counts.unsafe;
        const std::string where = seq_text(v) + " vertex " + std::to_string(x);

        VertexSet in_b(h.size(), false), in_gv(h.size(), false), in_x(h.size(), false);
        for (Vertex u : s.bad) in_b[u] = true;
        for (Vertex u : s.good) in_gv[u] = true;
        in_gv[x] = true;
        for (Vertex u : s.x) in_x[u] = true;

        // Complementing a good vertex of B leaves a good vertex in B.
        for (Vertex u : s.bad) {
            if (!h.good(u)) continue;
            ++counts.good_in_b;
            const OverlapGraph hu = h.complement(u);
            if (!hu.has_good_in(in_b)) return where + ": no good vertex in B after complementing " + std::to_string(u);
        }

        // X neighbourhoods and restriction equality along a random good
        // sequence from B.
        Dense d(h);
        OverlapGraph g = h;
        const OverlapGraph base = h.induced(in_gv);
        auto x_neighbourhoods = [&]() -> std::string {
            for (Vertex w : s.bad) {
                if (!g.good(w)) continue;
                for (Vertex y = 0; y < g.size(); ++y) {
                    if (in_gv[y] && g.edge(w, y) != in_x[y]) {
                        return where + ": good vertex " + std::to_string(w) + " and X disagree at " + std::to_string(y);
                    }
                }
            }
            return {};
        };
        if (std::string e = x_neighbourhoods(); !e.empty()) return e;
        std::size_t m = 0;
        const std::size_t limit = 1 + rng() % 6;
        while (m < limit) {
            std::vector<Vertex> cand;
            for (Vertex u : s.bad)
                if (g.good(u)) cand.push_back(u);
            if (cand.empty()) break;
            const Vertex u = cand[rng() % cand.size()];
            g.complement_in_place(u);
            d.complement(u);
            ++m;
            if (!d.same_as(g)) return where + ": complementation differs from the dense oracle";
            if (std::string e = x_neighbourhoods(); !e.empty()) return e;
            if (m % 2 == 0) {
                ++counts.even_sequences;
                if (!(g.induced(in_gv) == base)) return where + ": even sequence changed G + v";
            }
        }
        ++counts.sequences;
    }
    return {};
}

struct GraphCounts {
    std::size_t sorts = 0;
    std::size_t recursions = 0;
};

// sort_graph with checks on (insertion safety asserted every time), then a
// dense replay of the sequence: good when applied, everything isolated at
// the end, length equal to n + 1 - cycles.
inline std::string graph_sort_trial(std::mt19937_64& rng, GraphCounts& counts, std::size_t max_n = 14) {
    const std::size_t n = 1 + rng() % max_n;
    const Seq v = random_bad_free(rng, n);
    const OverlapGraph h = OverlapGraph::build(oracle::make(v));
    GraphSortResult r;
    try {
        r = sort_graph(h, GraphSortOptions{true});
    } catch (const std::logic_error& e) {
        return seq_text(v) + ": " + e.what();
    }
    ++counts.sorts;
    counts.recursions += r.recursions;
    Dense d(h);
    for (Vertex u : r.sequence) {
        if (!d.good[u]) return seq_text(v) + ": complemented bad vertex " + std::to_string(u);
        d.complement(u);
    }
    if (!d.same_as(r.final_graph)) return seq_text(v) + ": final graph differs from replay";
    for (Vertex u = 0; u < d.adj.size(); ++u) {
        for (Vertex w = 0; w < d.adj.size(); ++w)
            if (d.adj[u][w]) return seq_text(v) + ": final graph has an edge";
        if (d.good[u]) return seq_text(v) + ": final graph has a good vertex";
    }
    const std::size_t want = n + 1 - oracle::cycles(v);
    if (r.sequence.size() != want) {
        return seq_text(v) + ": graph sequence length " + std::to_string(r.sequence.size()) + ", expected " +
               std::to_string(want);
    }
    return {};
}

// Array mirror of a tree: permutation plus eligibility flags.
struct Mirror {
    Seq v;
    std::vector<bool> in_max, in_min;  // indexed by value 0..n+1

    explicit Mirror(const Seq& s) : v(s), in_max(s.size(), false), in_min(s.size(), false) {
        for (std::size_t q = 0; q + 1 < s.size(); ++q) {
            in_min[q] = true;
            in_max[q + 1] = true;
        }
        for (std::size_t k = 0; k + 1 < v.size(); ++k) drop_if_adjacency(k);
    }

    void drop_if_adjacency(std::size_t k) {
        if (v[k + 1] - v[k] != 1) return;
        const Element q = std::min(mag(v[k]), mag(v[k + 1]));
        in_min[static_cast<std::size_t>(q)] = false;
        in_max[static_cast<std::size_t>(q) + 1] = false;
    }

    void flip(std::size_t i, std::size_t j) { v = oracle::flip(v, i, j); }

    // Reversal that joins a and b, found by trying both boundary choices.
    std::pair<std::size_t, std::size_t> joining(Element a, Element b) const {
        std::size_t pa = oracle::position(v, mag(a)), pb = oracle::position(v, mag(b));
        if (pa > pb) std::swap(pa, pb);
        const std::pair<std::size_t, std::size_t> c[2] = {{pa, pb - 1}, {pa + 1, pb}};
        for (const auto& [i, j] : c) {
            if (i < 1 || j < i || j + 2 > v.size()) continue;
            const Seq w = oracle::flip(v, i, j);
            const std::size_t x = oracle::position(w, std::min(mag(a), mag(b)));
            if (x + 1 < w.size() && w[x + 1] - w[x] == 1 && mag(w[x + 1]) == std::max(mag(a), mag(b))) return {i, j};
            if (x > 0 && w[x] - w[x - 1] == 1 && mag(w[x - 1]) == std::max(mag(a), mag(b))) return {i, j};
        }
        return {0, 0};
    }

    Extremes extremes() const {
        Extremes e;
        for (Element x : v) {
            const std::size_t a = static_cast<std::size_t>(mag(x));
            if (x < 0 && in_max[a] && (e.max_neg == 0 || x > e.max_neg)) e.max_neg = x;
            if (x > 0 && in_max[a] && (e.min_pos == 0 || x < e.min_pos)) e.min_pos = x;
            if (x < 0 && in_min[a] && (e.min_neg == 0 || x < e.min_neg)) e.min_neg = x;
            if (x > 0 && in_min[a] && (e.max_pos == 0 || x > e.max_pos)) e.max_pos = x;
        }
        return e;
    }

    std::size_t eligible_pairs() const {
        std::size_t c = 0;
        for (std::size_t q = 0; q + 1 < v.size(); ++q) c += in_min[q] && in_max[q + 1];
        return c;
    }

    bool good_eligible(Element q) const {
        const std::size_t u = static_cast<std::size_t>(q);
        if (!in_min[u] || !in_max[u + 1]) return false;
        return (v[oracle::position(v, q)] < 0) != (v[oracle::position(v, q + 1)] < 0);
    }

    bool any_good_eligible() const {
        for (std::size_t q = 0; q + 1 < v.size(); ++q)
            if (good_eligible(static_cast<Element>(q))) return true;
        return false;
    }
};

struct TreeCounts {
    std::size_t steps = 0;
    std::size_t applies = 0;
    std::size_t undos = 0;
};

// Mixed apply / undo / arbitrary reversal / splay / rotate steps against the
// mirror. Every step compares the order, the Q flags, the root extremes, the
// good-pair test and find_good; check_invariants recomputes every node.
inline std::string tree_trial(std::mt19937_64& rng, TreeCounts& counts, std::size_t max_n = 40, int steps = 25) {
    const std::size_t n = 1 + rng() % max_n;
    const Seq start = oracle::random_signed(rng, n);
    Mirror m(start);
    RevTree t(oracle::make(start));
    std::vector<Reversal> applied;
    const std::string where = seq_text(start);
    for (int step = 0; step < steps; ++step) {
        const unsigned op = rng() % 10;
        std::string what;
        if (op < 4) {
            const auto goods = good_pairs(oracle::make(m.v));
            if (goods.empty()) continue;
            const IdentityPair g = goods[rng() % goods.size()];
            const auto [i, j] = m.joining(g.lo, g.hi);
            const Reversal r = t.apply_pair_reversal(g);
            if (r.first != i || r.last != j) return where + ": pair reversal at the wrong positions";
            m.flip(i, j);
            m.drop_if_adjacency(i - 1);
            m.drop_if_adjacency(j);
            applied.push_back(r);
            ++counts.applies;
        } else if (op < 6) {
            if (applied.empty()) continue;
            const Reversal r = applied.back();
            applied.pop_back();
            t.undo_reversal(r);
            m.flip(r.first, r.last);
            ++counts.undos;
        } else if (op < 7) {
            const std::size_t i = 1 + rng() % n;
            const std::size_t j = i + rng() % (n - i + 1);
            t.undo_reversal({i, j});
            m.flip(i, j);
            applied.clear();
        } else if (op < 8) {
            const Element x = static_cast<Element>(rng() % (n + 2));
            t.splay(x);
            if (t.root_element() != m.v[oracle::position(m.v, x)]) return where + ": splayed node is not the root";
            const auto right = t.right_of_root();
            const std::size_t p = oracle::position(m.v, x);
            if (right != Seq(m.v.begin() + static_cast<std::ptrdiff_t>(p) + 1, m.v.end())) {
                return where + ": right subtree after splay is not the suffix";
            }
        } else {
            t.rotate(static_cast<Element>(rng() % (n + 2)));
        }
        ++counts.steps;
        if (oracle::extended(t.to_permutation()) != m.v) return where + ": order differs after step " + std::to_string(step);
        const EligibleSets e = t.eligible();
        for (std::size_t q = 0; q < m.v.size(); ++q) {
            if (e.in_max(static_cast<Element>(q)) != m.in_max[q] || e.in_min(static_cast<Element>(q)) != m.in_min[q]) {
                return where + ": eligibility differs at " + std::to_string(q);
            }
        }
        if (!(t.root_extremes() == m.extremes())) return where + ": root extremes differ";
        if (t.eligible_pairs() != m.eligible_pairs()) return where + ": eligible pair count differs";
        const bool any = m.any_good_eligible();
        if (t.good_pair_exists() != any) return where + ": good pair test disagrees";
        const auto found = t.find_good();
        if (found.has_value() != any) return where + ": find_good disagrees";
        if (found && !m.good_eligible(found->index())) return where + ": find_good returned an ineligible pair";
        if (found) {
            const Element lo = m.v[oracle::position(m.v, found->index())];
            const Element hi = m.v[oracle::position(m.v, found->index() + 1)];
            if (found->lo != lo || found->hi != hi) return where + ": find_good signs differ";
        }
        for (Element x = 0; x <= static_cast<Element>(n) + 1; ++x) {
            const std::size_t p = oracle::position(m.v, x);
            if (t.sign_of(x) != (m.v[p] < 0 ? -1 : 1) || t.position_of(x) != p) return where + ": lookup differs";
        }
        try {
            t.check_invariants();
        } catch (const std::logic_error& e) {
            return where + ": " + e.what();
        }
    }
    return {};
}

// Replays pairs with the array model: each must be good when reached.
inline std::string replay_check(Seq v, const std::vector<Reversal>& prefix, const std::vector<IdentityPair>& pairs,
                                const std::vector<Reversal>& reversals) {
    for (const Reversal& r : prefix) v = oracle::flip(v, r.first, r.last);
    if (reversals.size() != pairs.size()) return "reversal count differs from pair count";
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const Element q = pairs[k].index();
        const Element a = v[oracle::position(v, q)];
        const Element b = v[oracle::position(v, q + 1)];
        if ((a < 0) == (b < 0)) return "pair " + std::to_string(k) + " not good when reached";
        if (pairs[k].lo != a || pairs[k].hi != b) return "pair " + std::to_string(k) + " signs differ from the permutation";
        Mirror m(v);
        const auto [i, j] = m.joining(a, b);
        if (reversals[k] != Reversal{i, j}) return "reversal " + std::to_string(k) + " is not the one the pair induces";
        v = oracle::flip(v, i, j);
    }
    if (v != oracle::identity(v.size() - 2)) return "does not reach the identity";
    return {};
}

// Solver with checks on a bad-component-free permutation: the recovery
// assertions run inside, the output is replayed and its length compared with
// n + 1 - cycles.
inline std::string recovery_trial(std::mt19937_64& rng, SolverStats& stats, std::size_t max_n = 64) {
    const std::size_t n = 1 + rng() % max_n;
    const Seq v = random_bad_free(rng, n);
    SolverOptions o;
    o.checks = true;
    SortingScenario s;
    try {
        s = sort_signed_permutation(oracle::make(v), o, &stats);
    } catch (const std::exception& e) {
        return seq_text(v) + ": " + e.what();
    }
    if (!s.prefix.empty()) return seq_text(v) + ": prefix on a permutation without bad components";
    if (const std::string r = replay_check(v, s.prefix, s.pairs, s.reversals); !r.empty()) return seq_text(v) + ": " + r;
    if (s.length() != n + 1 - oracle::cycles(v)) return seq_text(v) + ": length is not n + 1 - cycles";
    return {};
}

// Any permutation, bad components included: good-only replay of the output.
inline std::string replay_trial(std::mt19937_64& rng, std::size_t max_n = 64) {
    const std::size_t n = 1 + rng() % max_n;
    Seq v = oracle::random_signed(rng, n);
    if (rng() % 2) {
        // Identity with shuffled all-positive windows: bad components,
        // some of them nested or spoiled by a stray negative.
        v = oracle::identity(n);
        for (int w = 0; w < 3 && n >= 3; ++w) {
            const std::size_t i = 1 + rng() % (n - 2);
            const std::size_t len = 3 + rng() % std::min<std::size_t>(n - i, 8);
            if (i + len > n + 1) continue;
            std::shuffle(v.begin() + static_cast<std::ptrdiff_t>(i) + 1, v.begin() + static_cast<std::ptrdiff_t>(i + len) - 1, rng);
            if (rng() % 4 == 0) v[i + rng() % (len - 1)] *= -1;
        }
    }
    SortingScenario s;
    try {
        s = sort_signed_permutation(oracle::make(v));
    } catch (const std::exception& e) {
        return seq_text(v) + ": " + e.what();
    }
    if (const std::string r = replay_check(v, s.prefix, s.pairs, s.reversals); !r.empty()) return seq_text(v) + ": " + r;
    if (!is_identity(s.final_permutation)) return seq_text(v) + ": final permutation is not the identity";
    return {};
}

}  // namespace props
