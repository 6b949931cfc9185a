#include "signrev/reversal_tree.hpp"

#include <algorithm>
#include <cstdlib>
#include <new>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#ifdef __linux__
#include <sys/mman.h>
#endif

namespace signrev {

namespace detail {

void* allocate_pages(std::size_t bytes) {
    constexpr std::size_t huge = std::size_t{1} << 21;
    const std::size_t align = bytes >= huge ? huge : 64;
    const std::size_t rounded = (std::max<std::size_t>(bytes, 1) + align - 1) / align * align;
    void* p = std::aligned_alloc(align, rounded);
    if (p == nullptr) throw std::bad_alloc();
#ifdef MADV_HUGEPAGE
    if (align == huge) madvise(p, rounded, MADV_HUGEPAGE);
#endif
    return p;
}

void free_pages(void* p) noexcept { std::free(p); }

}  // namespace detail

namespace {

Element magnitude(Element x) { return x < 0 ? -x : x; }

// Zero means absent in every slot.
Element larger(Element a, Element b) {
    if (a == 0) return b;
    if (b == 0) return a;
    return std::max(a, b);
}

Element smaller(Element a, Element b) {
    if (a == 0) return b;
    if (b == 0) return a;
    return std::min(a, b);
}

template <class P>
P flip(const P& e) {
    P out;
    out.max_neg = -e.min_pos;
    out.min_pos = -e.max_neg;
    out.min_neg = -e.max_pos;
    out.max_pos = -e.min_neg;
    return out;
}

template <class P>
P merge(const P& a, const P& b) {
    P out;
    out.max_neg = std::max(a.max_neg, b.max_neg);
    out.min_pos = std::min(a.min_pos, b.min_pos);
    out.min_neg = std::min(a.min_neg, b.min_neg);
    out.max_pos = std::max(a.max_pos, b.max_pos);
    return out;
}

template <class P>
Extremes unpack(const P& e) {
    auto value = [](std::int32_t v) { return v == P::big || v == -P::big ? Element{0} : Element{v}; };
    return {value(e.max_neg), value(e.min_pos), value(e.min_neg), value(e.max_pos)};
}

std::optional<Element> present(Element v) {
    if (v == 0) return std::nullopt;
    return v;
}

}  // namespace

RevTree::RevTree(const SignedPermutation& p, const EligibleSets& q) : n_(p.size()) {
    if (q.size() != n_) throw std::invalid_argument("eligible sets sized for a different permutation");
    if (n_ + 2 >= static_cast<std::size_t>(Packed::big)) {
        throw std::length_error("tree holds at most " + std::to_string(Packed::big - 3) + " elements");
    }
    const auto e = p.elements();
    nodes_.resize(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
        const auto v = static_cast<std::size_t>(magnitude(e[k]));
        nodes_[v].neg = e[k] < 0;
        nodes_[v].in_max = q.in_max(static_cast<Element>(v));
        nodes_[v].in_min = q.in_min(static_cast<Element>(v));
    }
    // Fixed seed: runs are reproducible, and no input can depend on the keys.
    std::mt19937_64 rng(0x5eed5eedULL);
    key_.resize(e.size() - 1);
    for (auto& k : key_) {
        do k = rng();
        while (k == 0);
    }
    for (std::size_t v = 0; v + 1 < e.size(); ++v)
        if (pair_eligible(v)) ++eligible_pairs_;
    for (std::size_t v = 0; v < e.size(); ++v) nodes_[v].weight = weight(static_cast<NodeId>(v));
    const std::vector<Element> elems(e.begin(), e.end());
    root_ = build(elems, 0, elems.size(), nil);
}

RevTree::NodeId RevTree::build(const std::vector<Element>& elems, std::size_t lo, std::size_t hi, NodeId parent) {
    if (lo >= hi) return nil;
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto x = static_cast<NodeId>(magnitude(elems[mid]));
    nodes_[x].parent = parent;
    nodes_[x].child[0] = build(elems, lo, mid, x);
    nodes_[x].child[1] = build(elems, mid + 1, hi, x);
    pull(x);
    return x;
}

Element RevTree::stored_value(NodeId x) const {
    const auto v = static_cast<Element>(x);
    return nodes_[x].neg ? -v : v;
}

RevTree::Packed RevTree::own_extremes(NodeId x) const {
    Packed out;
    const auto v = static_cast<std::int32_t>(stored_value(x));
    if (v == 0) return out;
    if (nodes_[x].in_max) (v < 0 ? out.max_neg : out.min_pos) = v;
    if (nodes_[x].in_min) (v < 0 ? out.min_neg : out.max_pos) = v;
    return out;
}

std::uint64_t RevTree::weight(NodeId x) const {
    std::uint64_t w = 0;
    if (x > 0 && pair_eligible(x - 1)) w ^= key_[x - 1];
    if (x + 1 < nodes_.size() && pair_eligible(x)) w ^= key_[x];
    return w;
}

RevTree::Packed RevTree::effective(NodeId x) const {
    if (x == nil) return {};
    return nodes_[x].rev ? flip(nodes_[x].ext) : nodes_[x].ext;
}

// A set flag means the whole subtree, this node included, still has to be
// mirrored and negated.
void RevTree::push(NodeId x) {
    Node& node = nodes_[x];
    if (!node.rev) return;
    node.rev = false;
    std::swap(node.child[0], node.child[1]);
    for (NodeId c : node.child)
        if (c != nil) nodes_[c].rev = !nodes_[c].rev;
    node.neg = !node.neg;
    node.ext = flip(node.ext);
    std::swap(node.xneg, node.xpos);
}

void RevTree::pull(NodeId x) {
    Node& node = nodes_[x];
    node.size = 1 + size_of(node.child[0]) + size_of(node.child[1]);
    node.ext = merge(merge(effective(node.child[0]), own_extremes(x)), effective(node.child[1]));
    node.xneg = 0;
    node.xpos = 0;
    for (NodeId c : node.child) {
        if (c == nil) continue;
        const Node& child = nodes_[c];
        node.xneg ^= child.rev ? child.xpos : child.xneg;
        node.xpos ^= child.rev ? child.xneg : child.xpos;
    }
    (node.neg ? node.xneg : node.xpos) ^= node.weight;
}

void RevTree::push_path(NodeId x) {
    path_.clear();
    for (NodeId y = x; y != nil; y = nodes_[y].parent) path_.push_back(y);
    for (auto it = path_.rbegin(); it != path_.rend(); ++it) push(*it);
}

// Both x and its parent must carry no pending flag. Splaying defers the pull
// of x to the end.
void RevTree::rotate_up(NodeId x, bool pull_x) {
    const NodeId y = nodes_[x].parent;
    const NodeId g = nodes_[y].parent;
    const int side = nodes_[y].child[1] == x ? 1 : 0;
    const NodeId b = nodes_[x].child[1 - side];

    nodes_[y].child[side] = b;
    if (b != nil) nodes_[b].parent = y;
    nodes_[x].child[1 - side] = y;
    nodes_[y].parent = x;
    nodes_[x].parent = g;
    if (g != nil) {
        nodes_[g].child[nodes_[g].child[1] == y ? 1 : 0] = x;
    }
    pull(y);
    if (pull_x) pull(x);
    ++rotations_;
}

void RevTree::splay_node(NodeId x) {
    push_path(x);
    while (nodes_[x].parent != nil) {
        const NodeId y = nodes_[x].parent;
        const NodeId g = nodes_[y].parent;
        if (g != nil) {
            const bool zigzig = (nodes_[g].child[1] == y) == (nodes_[y].child[1] == x);
            rotate_up(zigzig ? y : x, false);
        }
        rotate_up(x, false);
    }
    pull(x);
}

RevTree::NodeId RevTree::nth(NodeId root, std::size_t k) {
    NodeId x = root;
    while (true) {
        push(x);
        const std::size_t left = size_of(nodes_[x].child[0]);
        if (k < left) {
            x = nodes_[x].child[0];
        } else if (k == left) {
            return x;
        } else {
            k -= left + 1;
            x = nodes_[x].child[1];
        }
    }
}

RevTree::NodeId RevTree::node_of(Element value) const {
    const Element m = magnitude(value);
    if (static_cast<std::size_t>(m) >= nodes_.size()) {
        throw std::out_of_range("element " + std::to_string(value) + " outside 0.." + std::to_string(n_ + 1));
    }
    return static_cast<NodeId>(m);
}

void RevTree::splay(Element value) {
    const NodeId x = node_of(value);
    splay_node(x);
    root_ = x;
}

void RevTree::rotate(Element value) {
    const NodeId x = node_of(value);
    if (nodes_[x].parent == nil) return;
    push_path(x);
    const NodeId y = nodes_[x].parent;
    rotate_up(x, true);
    if (root_ == y) root_ = x;
}

Element RevTree::root_element() const {
    const Element v = stored_value(root_);
    return nodes_[root_].rev ? -v : v;
}

int RevTree::sign_of(Element value) {
    splay(value);
    return nodes_[root_].neg ? -1 : 1;
}

std::size_t RevTree::position_of(Element value) {
    splay(value);
    return size_of(nodes_[root_].child[0]);
}

Element RevTree::element_at(std::size_t pos) {
    if (pos >= nodes_.size()) throw std::out_of_range("position " + std::to_string(pos) + " outside tree");
    const NodeId x = nth(root_, pos);
    splay_node(x);
    root_ = x;
    return stored_value(x);
}

void RevTree::reverse_range(Reversal r) {
    check_reversal(n_, r);
    // Left part: everything up to position first - 1.
    const NodeId left = nth(root_, r.first - 1);
    splay_node(left);
    NodeId rest = nodes_[left].child[1];
    nodes_[left].child[1] = nil;
    nodes_[rest].parent = nil;
    pull(left);

    // Middle part ends at position last; the remainder is its right child.
    const NodeId mid = nth(rest, r.last - r.first);
    splay_node(mid);
    const NodeId right = nodes_[mid].child[1];
    nodes_[mid].child[1] = nil;
    nodes_[right].parent = nil;
    pull(mid);

    nodes_[mid].rev = !nodes_[mid].rev;

    const NodeId last = nth(mid, r.last - r.first);
    splay_node(last);
    nodes_[last].child[1] = right;
    nodes_[right].parent = last;
    pull(last);

    nodes_[left].child[1] = last;
    nodes_[last].parent = left;
    pull(left);
    root_ = left;
}

void RevTree::refresh(NodeId x) {
    splay_node(x);
    root_ = x;
    pull(x);
}

// Recomputes the aggregates from x to the root. Pending flags above x do not
// matter: every node's fields live in its own frame.
void RevTree::refresh_up(NodeId x) {
    for (NodeId y = x; y != nil; y = nodes_[y].parent) pull(y);
}

// The weights of x's value neighbours depend on x's flags too.
void RevTree::set_eligibility(NodeId x, bool in_max, bool in_min) {
    const std::size_t lo = x > 0 ? x - 1 : x;
    const std::size_t hi = std::min<std::size_t>(x + 1, nodes_.size() - 1);
    for (std::size_t q = lo; q < hi; ++q)
        if (pair_eligible(q)) --eligible_pairs_;
    nodes_[x].in_max = in_max;
    nodes_[x].in_min = in_min;
    for (std::size_t q = lo; q < hi; ++q)
        if (pair_eligible(q)) ++eligible_pairs_;
    for (std::size_t y = lo; y <= hi; ++y) {
        nodes_[y].weight = weight(static_cast<NodeId>(y));
        refresh(static_cast<NodeId>(y));
    }
}

// Drops q+1 from Q_M and q from Q_m; only nodes q and q+1 change.
void RevTree::remove_pair(NodeId q) {
    if (pair_eligible(q)) --eligible_pairs_;
    nodes_[q + 1].in_max = false;
    nodes_[q].in_min = false;
    nodes_[q].weight = weight(q);
    nodes_[q + 1].weight = weight(q + 1);
    refresh_up(q);
    refresh_up(q + 1);
}

Reversal RevTree::locate_and_reverse(const IdentityPair& pair) {
    const Element a = pair.lo, b = pair.hi;
    const NodeId lo = node_of(pair.lo);
    const NodeId hi = node_of(pair.hi);
    splay_node(lo);
    root_ = lo;
    const bool lo_neg = nodes_[lo].neg;
    const std::size_t pos_lo = size_of(nodes_[lo].child[0]);
    splay_node(hi);
    root_ = hi;
    const bool hi_neg = nodes_[hi].neg;
    const std::size_t pos_hi = size_of(nodes_[hi].child[0]);
    if (lo_neg != (pair.lo < 0) || hi_neg != (pair.hi < 0)) {
        throw InvalidPairError("signs do not match the tree: (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    if (!pair.good()) throw InvalidPairError("pair is not good: (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    const Reversal r = mu_at(pair.lo, pos_lo, pair.hi, pos_hi);
    reverse_range(r);
    return r;
}

Reversal RevTree::apply_pair_only(Element a, Element b) { return locate_and_reverse(IdentityPair(a, b)); }

Reversal RevTree::apply_pair_reversal(Element a, Element b) {
    const IdentityPair pair(a, b);
    const Reversal r = locate_and_reverse(pair);
    // A pair summing to 1 meets at the right boundary, one summing to -1 at
    // the left; only the other boundary needs a look.
    const bool joined_left = a + b == -1;
    remove_pair(static_cast<NodeId>(pair.index()));
    if (policy_ == EligibilityUpdate::all_created) {
        const std::size_t other = joined_left ? r.last : r.first - 1;
        const Element x = element_at(other);
        const Element y = element_at(other + 1);
        if (is_adjacency(x, y)) remove_pair(static_cast<NodeId>(std::min(magnitude(x), magnitude(y))));
    }
    return r;
}

void RevTree::undo_reversal(Reversal r) { reverse_range(r); }

std::optional<IdentityPair> RevTree::find_good() {
    const Extremes ext = root_extremes();
    if (ext.max_neg != 0) {
        const Element q = -ext.max_neg;
        if (sign_of(q - 1) > 0) return IdentityPair(q - 1, -q);
    }
    if (ext.min_neg != 0) {
        const Element q = -ext.min_neg;
        if (sign_of(q + 1) > 0) return IdentityPair(-q, q + 1);
    }
    // The negative candidates miss a good pair when the chain of eligible
    // pairs below M- (or above m-) ends in a broken adjacency. The positive
    // extremes catch the sign change from the other side.
    if (ext.min_pos != 0) {
        const Element q = ext.min_pos;
        if (sign_of(q - 1) < 0) return IdentityPair(-(q - 1), q);
    }
    if (ext.max_pos != 0) {
        const Element q = ext.max_pos;
        if (sign_of(q + 1) < 0) return IdentityPair(q, -(q + 1));
    }
    if (!good_pair_exists()) return std::nullopt;
    return scan_good();
}

// The extremes see one candidate per chain end; a good pair wedged between
// uniform chains needs the full walk.
std::optional<IdentityPair> RevTree::scan_good() {
    ++fallback_scans_;
    const SignedPermutation p = to_permutation();
    const auto pos = p.positions();
    for (std::size_t q = 0; q + 1 < pos.size(); ++q) {
        if (!pair_eligible(q)) continue;
        const Element a = p[pos[q]], b = p[pos[q + 1]];
        if ((a < 0) != (b < 0)) return IdentityPair(a, b);
    }
    return std::nullopt;
}

bool RevTree::good_pair_exists() const {
    const Node& r = nodes_[root_];
    return (r.rev ? r.xpos : r.xneg) != 0;
}

bool RevTree::has_negative() const {
    const Extremes ext = root_extremes();
    return ext.max_neg != 0 || ext.min_neg != 0;
}

Extremes RevTree::root_extremes() const { return unpack(effective(root_)); }

std::optional<Element> RevTree::max_negative() const { return present(root_extremes().max_neg); }

std::optional<Element> RevTree::min_negative() const { return present(root_extremes().min_neg); }

SignedPermutation RevTree::to_permutation() const {
    std::vector<Element> out;
    out.reserve(nodes_.size());
    // Iterative in-order walk carrying the parity of flags seen so far.
    struct Item {
        NodeId node;
        bool parity;
        bool expanded;
    };
    std::vector<Item> stack{{root_, false, false}};
    while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        if (it.node == nil) continue;
        const Node& node = nodes_[it.node];
        const bool parity = it.parity != node.rev;
        if (it.expanded) {
            const Element v = stored_value(it.node);
            out.push_back(parity ? -v : v);
            continue;
        }
        const NodeId first = parity ? node.child[1] : node.child[0];
        const NodeId last = parity ? node.child[0] : node.child[1];
        stack.push_back({last, parity, false});
        stack.push_back({it.node, it.parity, true});
        stack.push_back({first, parity, false});
    }
    return SignedPermutation::from_extended(out);
}

EligibleSets RevTree::eligible() const {
    auto s = EligibleSets::full(n_);
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        if (!nodes_[v].in_max) s.erase_max(static_cast<Element>(v));
        if (!nodes_[v].in_min) s.erase_min(static_cast<Element>(v));
    }
    return s;
}

std::vector<Element> RevTree::right_of_root() const {
    std::vector<Element> out;
    const NodeId r = nodes_[root_].rev ? nodes_[root_].child[0] : nodes_[root_].child[1];
    if (r == nil) return out;
    struct Item {
        NodeId node;
        bool parity;
        bool expanded;
    };
    std::vector<Item> stack{{r, nodes_[root_].rev, false}};
    while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        if (it.node == nil) continue;
        const Node& node = nodes_[it.node];
        const bool parity = it.parity != node.rev;
        if (it.expanded) {
            const Element v = stored_value(it.node);
            out.push_back(parity ? -v : v);
            continue;
        }
        stack.push_back({parity ? node.child[0] : node.child[1], parity, false});
        stack.push_back({it.node, it.parity, true});
        stack.push_back({parity ? node.child[1] : node.child[0], parity, false});
    }
    return out;
}

void RevTree::check_invariants() const {
    auto fail = [](const std::string& what) { throw std::logic_error("tree invariant: " + what); };
    if (root_ == nil || nodes_[root_].parent != nil) fail("root has a parent");
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeId> order{root_};
    for (std::size_t k = 0; k < order.size(); ++k) {
        const NodeId x = order[k];
        if (seen[x]) fail("node " + std::to_string(x) + " reached twice");
        seen[x] = true;
        for (NodeId c : nodes_[x].child) {
            if (c == nil) continue;
            if (nodes_[c].parent != x) fail("parent link of " + std::to_string(c));
            order.push_back(c);
        }
    }
    if (order.size() != nodes_.size()) fail("tree does not hold every element");

    // For every node, list its subtree with values seen from the node's own
    // frame (the node's flag excluded) and compare against stored fields.
    for (NodeId v : order) {
        Extremes expect;
        std::uint64_t xneg = 0, xpos = 0;
        std::size_t count = 0;
        struct Item {
            NodeId node;
            bool parity;
        };
        std::vector<Item> stack{{v, false}};
        while (!stack.empty()) {
            const Item it = stack.back();
            stack.pop_back();
            ++count;
            const Element raw = stored_value(it.node);
            const Element value = it.parity ? -raw : raw;
            if (nodes_[it.node].weight != weight(it.node)) fail("weight of node " + std::to_string(it.node));
            ((nodes_[it.node].neg != it.parity) ? xneg : xpos) ^= weight(it.node);
            if (value != 0) {
                const auto x = it.node;
                if (nodes_[x].in_max) {
                    if (value < 0) expect.max_neg = larger(expect.max_neg, value);
                    else expect.min_pos = smaller(expect.min_pos, value);
                }
                if (nodes_[x].in_min) {
                    if (value < 0) expect.min_neg = smaller(expect.min_neg, value);
                    else expect.max_pos = larger(expect.max_pos, value);
                }
            }
            for (NodeId c : nodes_[it.node].child)
                if (c != nil) stack.push_back({c, it.parity != nodes_[c].rev});
        }
        if (count != nodes_[v].size) fail("size of node " + std::to_string(v));
        if (!(expect == unpack(nodes_[v].ext))) fail("extremal values of node " + std::to_string(v));
        if (xneg != nodes_[v].xneg || xpos != nodes_[v].xpos) fail("fingerprint of node " + std::to_string(v));
    }
    std::size_t pairs = 0;
    for (std::size_t q = 0; q + 1 < nodes_.size(); ++q)
        if (pair_eligible(q)) ++pairs;
    if (pairs != eligible_pairs_) fail("eligible pair count");
}

std::string RevTree::dump() const {
    std::ostringstream out;
    out << "element\trev\tinQM\tinQm\tM-\tm+\tm-\tM+\tsize\n";
    for (std::size_t x = 0; x < nodes_.size(); ++x) {
        const Node& node = nodes_[x];
        out << stored_value(static_cast<NodeId>(x)) << '\t' << node.rev << '\t' << node.in_max << '\t' << node.in_min
            << '\t' << unpack(node.ext).max_neg << '\t' << unpack(node.ext).min_pos << '\t'
            << unpack(node.ext).min_neg << '\t' << unpack(node.ext).max_pos << '\t' << node.size << '\n';
    }
    return out.str();
}

}  // namespace signrev
