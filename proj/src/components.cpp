#include "signrev/components.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace signrev {

namespace {

Element magnitude(Element x) { return x < 0 ? -x : x; }

// Open left-frame candidates grouped by a key, each group kept in increasing
// position order so that stack pops and range matches touch only the back.
class KeyedCandidates {
public:
    explicit KeyedCandidates(std::size_t n) : offset_(static_cast<Element>(2 * n + 4)), buckets_(4 * n + 9) {}

    void add(Element key, std::size_t pos) { bucket(key).push_back(pos); }

    void drop(Element key, std::size_t pos) {
        auto& b = bucket(key);
        if (!b.empty() && b.back() == pos) b.pop_back();
    }

    // Removes and reports every candidate with position strictly after bound.
    template <typename Fn>
    void take_after(Element key, std::ptrdiff_t bound, Fn&& fn) {
        if (key + offset_ < 0 || static_cast<std::size_t>(key + offset_) >= buckets_.size()) return;
        auto& b = bucket(key);
        while (!b.empty() && static_cast<std::ptrdiff_t>(b.back()) > bound) {
            fn(b.back());
            b.pop_back();
        }
    }

private:
    std::vector<std::size_t>& bucket(Element key) { return buckets_[static_cast<std::size_t>(key + offset_)]; }

    Element offset_;
    std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace

const char* to_string(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::trivial: return "trivial";
        case ComponentKind::good: return "good";
        case ComponentKind::bad: return "bad";
    }
    return "?";
}

bool ComponentForest::has_bad() const { return count(ComponentKind::bad) > 0; }

std::size_t ComponentForest::count(ComponentKind kind) const {
    return static_cast<std::size_t>(std::count_if(components.begin(), components.end(),
                                                  [kind](const Component& c) { return c.kind == kind; }));
}

// A window [i, j] is framed iff its endpoints hold its minimum and maximum
// absolute values with matching signs and it holds j - i + 1 distinct values
// in [min, max], i.e. max - min == j - i. For a fixed right end j the
// candidate left ends are the suffix minima (direct frame) or suffix maxima
// (reversed frame) of [0, j), cut off by the previous greater (resp. smaller)
// value. Each left end is reported once, at its smallest right end, which is
// what minimality asks for.
std::vector<FramedInterval> framed_intervals(const SignedPermutation& p) {
    const auto e = p.elements();
    const std::size_t len = e.size();
    std::vector<FramedInterval> out;

    std::vector<std::size_t> min_stack;  // increasing absolute values
    std::vector<std::size_t> max_stack;  // decreasing absolute values
    KeyedCandidates direct(p.size());    // key |a| - i for positive a at i
    KeyedCandidates reversed(p.size());  // key |b| + i for negative -b at i
    // Candidates closed by a match are gone from their bucket already; drop()
    // ignores them because it only removes a matching back entry.

    for (std::size_t j = 0; j < len; ++j) {
        const Element v = e[j];
        const Element m = magnitude(v);
        const auto sj = static_cast<Element>(j);

        while (!max_stack.empty() && magnitude(e[max_stack.back()]) < m) {
            const std::size_t top = max_stack.back();
            if (e[top] < 0) reversed.drop(magnitude(e[top]) + static_cast<Element>(top), top);
            max_stack.pop_back();
        }
        const std::ptrdiff_t prev_greater = max_stack.empty() ? -1 : static_cast<std::ptrdiff_t>(max_stack.back());

        while (!min_stack.empty() && magnitude(e[min_stack.back()]) > m) {
            const std::size_t top = min_stack.back();
            if (e[top] >= 0) direct.drop(e[top] - static_cast<Element>(top), top);
            min_stack.pop_back();
        }
        const std::ptrdiff_t prev_smaller = min_stack.empty() ? -1 : static_cast<std::ptrdiff_t>(min_stack.back());

        if (v > 0) {
            direct.take_after(v - sj, prev_greater, [&](std::size_t i) {
                out.push_back({i, j, e[i], v, false});
            });
        } else if (v < 0) {
            reversed.take_after(m + sj, prev_smaller, [&](std::size_t i) {
                out.push_back({i, j, m, magnitude(e[i]), true});
            });
        }

        min_stack.push_back(j);
        max_stack.push_back(j);
        if (v >= 0) direct.add(v - sj, j);
        if (v < 0) reversed.add(m + sj, j);
    }

    std::sort(out.begin(), out.end(),
              [](const FramedInterval& a, const FramedInterval& b) { return a.start_pos < b.start_pos; });
    return out;
}

ComponentForest find_components(const SignedPermutation& p) {
    const auto e = p.elements();
    const auto intervals = framed_intervals(p);

    ComponentForest forest;
    forest.components.reserve(intervals.size());
    for (const auto& fi : intervals) forest.components.push_back({fi, {}, std::nullopt, ComponentKind::trivial});

    // Sweep positions with a stack of open intervals; an interior position
    // belongs to the innermost open interval, frames to their own interval.
    std::vector<std::size_t> open;
    std::size_t next = 0;
    for (std::size_t pos = 0; pos < e.size(); ++pos) {
        while (!open.empty() && forest.components[open.back()].interval.end_pos <= pos) {
            auto& c = forest.components[open.back()];
            if (c.interval.end_pos == pos) c.elements.push_back(e[pos]);
            open.pop_back();
        }
        if (!open.empty()) forest.components[open.back()].elements.push_back(e[pos]);
        while (next < forest.components.size() && forest.components[next].interval.start_pos == pos) {
            auto& c = forest.components[next];
            if (!open.empty()) c.parent = open.back();
            c.elements.push_back(e[pos]);
            open.push_back(next);
            ++next;
        }
    }

    for (auto& c : forest.components) {
        if (c.elements.size() < 4) {
            c.kind = ComponentKind::trivial;
            continue;
        }
        const bool negative = c.elements.front() < 0;
        const bool uniform = std::all_of(c.elements.begin(), c.elements.end(),
                                         [negative](Element x) { return (x < 0) == negative; });
        c.kind = uniform ? ComponentKind::bad : ComponentKind::good;
    }
    return forest;
}

bool has_bad_component(const SignedPermutation& p) { return find_components(p).has_bad(); }

std::string components_to_json(const ComponentForest& forest) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : forest.components) {
        nlohmann::json item;
        item["elements"] = c.elements;
        item["kind"] = to_string(c.kind);
        item["frame"] = {c.interval.frame_lo, c.interval.frame_hi};
        item["positions"] = {c.interval.start_pos, c.interval.end_pos};
        item["parent"] = c.parent ? nlohmann::json(*c.parent) : nlohmann::json(nullptr);
        out.push_back(std::move(item));
    }
    return out.dump();
}

EligibleSets EligibleSets::full(std::size_t n) {
    EligibleSets s;
    s.n_ = n;
    s.max_.assign(n + 2, true);
    s.min_.assign(n + 2, true);
    s.max_[0] = false;
    s.min_[n + 1] = false;
    return s;
}

bool EligibleSets::in_max(Element q) const {
    return q >= 0 && static_cast<std::size_t>(q) < max_.size() && max_[static_cast<std::size_t>(q)];
}

bool EligibleSets::in_min(Element q) const {
    return q >= 0 && static_cast<std::size_t>(q) < min_.size() && min_[static_cast<std::size_t>(q)];
}

void EligibleSets::erase_max(Element q) {
    if (q >= 0 && static_cast<std::size_t>(q) < max_.size()) max_[static_cast<std::size_t>(q)] = false;
}

void EligibleSets::erase_min(Element q) {
    if (q >= 0 && static_cast<std::size_t>(q) < min_.size()) min_[static_cast<std::size_t>(q)] = false;
}

void EligibleSets::erase_adjacency(Element q) {
    erase_max(q + 1);
    erase_min(q);
}

std::vector<Element> EligibleSets::max_members() const {
    std::vector<Element> out;
    for (std::size_t q = 0; q < max_.size(); ++q)
        if (max_[q]) out.push_back(static_cast<Element>(q));
    return out;
}

std::vector<Element> EligibleSets::min_members() const {
    std::vector<Element> out;
    for (std::size_t q = 0; q < min_.size(); ++q)
        if (min_[q]) out.push_back(static_cast<Element>(q));
    return out;
}

EligibleSets eligible_sets(const SignedPermutation& p) {
    auto s = EligibleSets::full(p.size());
    for (Element q : adjacencies(p)) s.erase_adjacency(q);
    return s;
}

namespace detail {

std::size_t cycle_count(const SignedPermutation& p) {
    const std::size_t n = p.size();
    // Unsigned image: 0, then (2x-1, 2x) or (2x, 2x-1) per element, then 2n+1.
    std::vector<std::size_t> seq;
    seq.reserve(2 * n + 2);
    seq.push_back(0);
    for (Element x : p.interior()) {
        const auto m = static_cast<std::size_t>(magnitude(x));
        if (x > 0) {
            seq.push_back(2 * m - 1);
            seq.push_back(2 * m);
        } else {
            seq.push_back(2 * m);
            seq.push_back(2 * m - 1);
        }
    }
    seq.push_back(2 * n + 1);
    std::vector<std::size_t> where(seq.size());
    for (std::size_t k = 0; k < seq.size(); ++k) where[seq[k]] = k;

    std::vector<bool> seen(seq.size(), false);
    std::size_t cycles = 0;
    for (std::size_t start = 0; start < seq.size(); ++start) {
        if (seen[start]) continue;
        ++cycles;
        std::size_t v = start;
        while (!seen[v]) {
            seen[v] = true;
            const std::size_t k = where[v];
            const std::size_t u = seq[k % 2 == 0 ? k + 1 : k - 1];  // black edge
            seen[u] = true;
            v = u ^ 1u;  // grey edge
        }
    }
    return cycles;
}

namespace {

// Nesting tree: one round node per component, one square node per maximal
// chain of sibling components linked by a shared frame. Square nodes hang
// below the component enclosing the chain; a virtual root joins top chains.
struct NestingTree {
    std::vector<std::vector<std::size_t>> adj;
    std::vector<bool> bad;
    std::size_t root = 0;
};

NestingTree nesting_tree(const ComponentForest& forest) {
    const std::size_t rounds = forest.components.size();
    NestingTree t;
    t.adj.resize(rounds + 1);
    t.bad.assign(rounds + 1, false);
    t.root = rounds;
    for (std::size_t k = 0; k < rounds; ++k) t.bad[k] = forest.components[k].kind == ComponentKind::bad;

    auto new_node = [&t]() {
        t.adj.emplace_back();
        t.bad.push_back(false);
        return t.adj.size() - 1;
    };
    auto link = [&t](std::size_t a, std::size_t b) {
        t.adj[a].push_back(b);
        t.adj[b].push_back(a);
    };

    // Components are sorted by start; siblings therefore appear in order.
    std::vector<std::optional<std::size_t>> last_child(rounds + 1);
    std::vector<std::size_t> chain_of(rounds);
    for (std::size_t k = 0; k < rounds; ++k) {
        const auto& c = forest.components[k];
        const std::size_t parent = c.parent ? *c.parent : t.root;
        const auto prev = last_child[parent];
        if (prev && forest.components[*prev].interval.end_pos == c.interval.start_pos) {
            chain_of[k] = chain_of[*prev];
        } else {
            chain_of[k] = new_node();
            link(parent, chain_of[k]);
        }
        link(chain_of[k], k);
        last_child[parent] = k;
    }
    return t;
}

}  // namespace

std::size_t bad_component_cost(const ComponentForest& forest) {
    const NestingTree t = nesting_tree(forest);
    const std::size_t nodes = t.adj.size();
    const auto total_bad = static_cast<std::size_t>(std::count(t.bad.begin(), t.bad.end(), true));
    if (total_bad == 0) return 0;

    // Root the tree, count bad nodes per subtree, keep nodes on bad-bad paths.
    std::vector<std::size_t> order, parent(nodes, nodes);
    order.reserve(nodes);
    order.push_back(t.root);
    parent[t.root] = t.root;
    for (std::size_t k = 0; k < order.size(); ++k) {
        for (std::size_t u : t.adj[order[k]]) {
            if (u != parent[order[k]]) {
                parent[u] = order[k];
                order.push_back(u);
            }
        }
    }
    std::vector<std::size_t> below(nodes, 0), busy_children(nodes, 0);
    for (std::size_t k = order.size(); k-- > 0;) {
        const std::size_t v = order[k];
        below[v] += t.bad[v] ? 1 : 0;
        if (v != t.root) {
            below[parent[v]] += below[v];
            if (below[v] > 0) ++busy_children[parent[v]];
        }
    }
    std::vector<bool> kept(nodes, false);
    for (std::size_t v = 0; v < nodes; ++v) {
        kept[v] = below[v] > 0 && (t.bad[v] || busy_children[v] >= 2 || below[v] < total_bad);
    }
    std::vector<std::size_t> degree(nodes, 0);
    for (std::size_t v = 0; v < nodes; ++v) {
        if (!kept[v]) continue;
        for (std::size_t u : t.adj[v])
            if (kept[u]) ++degree[v];
    }

    std::size_t leaves = 0;
    bool short_branch = false;
    for (std::size_t v = 0; v < nodes; ++v) {
        if (!kept[v] || degree[v] > 1) continue;
        ++leaves;
        // Walk up the branch until a node of degree >= 3.
        std::size_t bad_on_branch = 0, prev = nodes, cur = v;
        while (true) {
            if (degree[cur] >= 3) break;
            if (t.bad[cur]) ++bad_on_branch;
            std::size_t next = nodes;
            for (std::size_t u : t.adj[cur])
                if (kept[u] && u != prev) next = u;
            if (next == nodes) break;
            prev = cur;
            cur = next;
        }
        if (bad_on_branch == 1) short_branch = true;
    }
    if (leaves % 2 == 0) return leaves;
    return short_branch ? leaves : leaves + 1;
}

}  // namespace detail

namespace {

struct Potential {
    std::size_t cost;  // bad_component_cost
    std::size_t total; // n + 1 - cycles + cost
};

Potential potential(const SignedPermutation& p) {
    const std::size_t cost = detail::bad_component_cost(find_components(p));
    return {cost, p.size() + 1 - detail::cycle_count(p) + cost};
}

// Breakpoints (x, x+1) whose smallest enclosing interval is the component.
std::vector<std::size_t> component_edges(const SignedPermutation& p, const ComponentForest& forest, std::size_t idx) {
    const auto& c = forest.components[idx];
    std::vector<bool> member(p.size() + 2, false);
    for (Element x : c.elements) member[static_cast<std::size_t>(magnitude(x))] = true;
    std::vector<bool> nested_pair_start(p.size() + 2, false);
    for (const auto& other : forest.components) {
        if (other.parent && *other.parent == idx && other.interval.end_pos == other.interval.start_pos + 1) {
            nested_pair_start[other.interval.start_pos] = true;
        }
    }
    std::vector<std::size_t> edges;
    for (std::size_t x = c.interval.start_pos; x < c.interval.end_pos; ++x) {
        if (member[static_cast<std::size_t>(magnitude(p[x]))] && member[static_cast<std::size_t>(magnitude(p[x + 1]))] &&
            !nested_pair_start[x]) {
            edges.push_back(x);
        }
    }
    return edges;
}

Reversal between_edges(std::size_t x, std::size_t y) {
    if (x > y) std::swap(x, y);
    return {x + 1, y};
}

}  // namespace

// Each step applies one reversal that lowers the number of reversals still
// needed by exactly one while shrinking the bad-component cost: merges of two
// bad leaves of the nesting tree are tried first (opposite leaves in position
// order), cuts inside a single bad leaf after. Candidates are screened with
// the breakpoint-graph potential, which is exact.
ClearingResult clear_bad_components(const SignedPermutation& p) {
    ClearingResult out{{}, p};
    while (true) {
        const ComponentForest forest = find_components(out.result);
        if (!forest.has_bad()) break;
        const Potential before{detail::bad_component_cost(forest),
                               out.result.size() + 1 - detail::cycle_count(out.result) +
                                   detail::bad_component_cost(forest)};

        std::vector<std::size_t> bad;
        for (std::size_t k = 0; k < forest.components.size(); ++k)
            if (forest.components[k].kind == ComponentKind::bad) bad.push_back(k);

        // Bad components with no bad component nested below them.
        std::vector<bool> has_bad_below(forest.components.size(), false);
        for (std::size_t k : bad) {
            auto up = forest.components[k].parent;
            while (up) {
                has_bad_below[*up] = true;
                up = forest.components[*up].parent;
            }
        }
        std::vector<std::size_t> leaves, inner;
        for (std::size_t k : bad) (has_bad_below[k] ? inner : leaves).push_back(k);

        std::vector<Reversal> candidates;
        auto add_merge = [&](std::size_t a, std::size_t b) {
            const auto ea = component_edges(out.result, forest, a);
            const auto eb = component_edges(out.result, forest, b);
            if (ea.empty() || eb.empty()) return;
            for (std::size_t x : {ea.front(), ea.back()})
                for (std::size_t y : {eb.front(), eb.back()})
                    if (x != y) candidates.push_back(between_edges(x, y));
        };
        auto add_cuts = [&](std::size_t a) {
            const auto edges = component_edges(out.result, forest, a);
            for (std::size_t s = 0; s < edges.size(); ++s)
                for (std::size_t u = s + 1; u < edges.size(); ++u) candidates.push_back(between_edges(edges[s], edges[u]));
        };

        std::vector<std::size_t> ends = leaves;
        ends.insert(ends.end(), inner.begin(), inner.end());
        const std::size_t half = leaves.size() / 2;
        for (std::size_t k = 0; k < half; ++k) add_merge(leaves[k], leaves[k + half]);
        if (leaves.size() % 2 == 1) add_cuts(leaves.back());
        for (std::size_t a = 0; a < ends.size(); ++a)
            for (std::size_t b = a + 1; b < ends.size(); ++b) add_merge(ends[a], ends[b]);
        for (std::size_t a : ends) add_cuts(a);

        bool progressed = false;
        for (const Reversal& r : candidates) {
            const SignedPermutation next = apply_reversal(out.result, r);
            const Potential after = potential(next);
            if (after.total + 1 == before.total && after.cost < before.cost) {
                out.reversals.push_back(r);
                out.result = next;
                progressed = true;
                break;
            }
        }
        if (!progressed) throw std::logic_error("no optimal reversal clears the bad components of " +
                                                format_extended(out.result));
    }
    return out;
}

}  // namespace signrev
