#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "signrev/components.hpp"
#include "signrev/permutation.hpp"

namespace signrev {

namespace detail {

void* allocate_pages(std::size_t bytes);
void free_pages(void* p) noexcept;

// Large arrays go on 2 MiB boundaries with a transparent huge page hint.
template <class T>
struct PageAllocator {
    using value_type = T;
    PageAllocator() = default;
    template <class U>
    PageAllocator(const PageAllocator<U>&) {}
    T* allocate(std::size_t n) { return static_cast<T*>(allocate_pages(n * sizeof(T))); }
    void deallocate(T* p, std::size_t) noexcept { free_pages(p); }
    friend bool operator==(const PageAllocator&, const PageAllocator&) { return true; }
};

}  // namespace detail

/// Extremal values of a subtree. Zero stands for "none": no interior element
/// is 0, and the sentinels 0 and n+1 are never negative.
struct Extremes {
    Element max_neg = 0;  // M-: negative from Q_M closest to zero
    Element min_pos = 0;  // m+ over Q_M, the value M- turns into under a flip
    Element min_neg = 0;  // m-: negative from Q_m farthest from zero
    Element max_pos = 0;  // M+ over Q_m, the value m- turns into under a flip

    Extremes flipped() const { return {-min_pos, -max_neg, -max_pos, -min_neg}; }

    friend bool operator==(const Extremes&, const Extremes&) = default;
};

/// Which adjacencies a pair reversal removes from Q: only the one joining
/// the pair itself, or every adjacency created at the reversal boundaries.
enum class EligibilityUpdate { joined_pair, all_created };

/// Splay tree over the extended permutation with lazy reversal flags and
/// extremal values restricted to the eligible sets. Node k holds the element
/// of absolute value k, so element lookup needs no search.
class RevTree {
public:
    using NodeId = std::uint32_t;
    static constexpr NodeId nil = static_cast<NodeId>(-1);

    RevTree(const SignedPermutation& p, const EligibleSets& q);
    explicit RevTree(const SignedPermutation& p) : RevTree(p, eligible_sets(p)) {}

    std::size_t size() const { return n_; }
    EligibilityUpdate policy() const { return policy_; }
    void set_policy(EligibilityUpdate policy) { policy_ = policy; }

    /// Applies mu(a, b), then drops from Q the entries of every adjacency
    /// created at the two boundaries of the reversal.
    Reversal apply_pair_reversal(Element a, Element b);
    Reversal apply_pair_reversal(const IdentityPair& pair) { return apply_pair_reversal(pair.lo, pair.hi); }
    /// Applies mu(a, b) and leaves Q alone.
    Reversal apply_pair_only(Element a, Element b);
    /// Reverses positions r.first..r.last without touching Q.
    void undo_reversal(Reversal r);

    /// The first good pair among the M-, m-, m+ (over Q_M) and M+ (over Q_m)
    /// candidates, each paired with its eligible neighbour value. When all four
    /// miss but good_pair_exists() holds, falls back to a linear scan.
    std::optional<IdentityPair> find_good();
    /// Whether some pair (q, q+1) with q in Q_m and q+1 in Q_M has opposite
    /// signs. Read off the root fingerprint in constant time; a false "no"
    /// needs a 64-bit XOR collision.
    bool good_pair_exists() const;
    bool all_bad() const { return !good_pair_exists(); }
    /// Number of pairs (q, q+1) still eligible on both sides.
    std::size_t eligible_pairs() const { return eligible_pairs_; }
    bool has_negative() const;

    /// Root extremal values, or nullopt when absent.
    std::optional<Element> max_negative() const;
    std::optional<Element> min_negative() const;
    Extremes root_extremes() const;

    /// +1 or -1. Throws std::out_of_range for values outside 0..n+1.
    int sign_of(Element value);
    std::size_t position_of(Element value);
    Element element_at(std::size_t pos);

    SignedPermutation to_permutation() const;
    EligibleSets eligible() const;

    /// Moves the node of |value| to the root.
    void splay(Element value);
    /// Promotes the node of |value| above its parent; no-op at the root.
    void rotate(Element value);
    Element root_element() const;
    /// Elements of the root's right subtree, in order.
    std::vector<Element> right_of_root() const;
    std::uint64_t rotations() const { return rotations_; }
    std::uint64_t fallback_scans() const { return fallback_scans_; }

    /// Recomputes order, sizes, links and every node's extremal values from
    /// scratch and throws std::logic_error on the first mismatch. Quadratic.
    void check_invariants() const;
    /// One line per node in element order: value, rev, eligibility, extremes.
    std::string dump() const;

private:
    // Extremal values as stored in the nodes. Absent slots hold -big or +big
    // so that plain min/max combine them and negation maps absent to absent.
    struct Packed {
        static constexpr std::int32_t big = 0x7fffffff;
        std::int32_t max_neg = -big;
        std::int32_t min_pos = big;
        std::int32_t min_neg = big;
        std::int32_t max_pos = -big;
    };

    struct alignas(64) Node {
        NodeId child[2] = {nil, nil};
        NodeId parent = nil;
        std::uint32_t size = 1;
        // XOR of the weights of the subtree's negative and positive elements.
        // An element's weight is the XOR of the keys of its eligible pairs, so
        // over all negatives the keys of same-sign pairs cancel.
        std::uint64_t xneg = 0;
        std::uint64_t xpos = 0;
        std::uint64_t weight = 0;
        Packed ext;
        bool rev = false;
        bool neg = false;  // sign of the stored value
        bool in_max = false;
        bool in_min = false;
    };

    Element stored_value(NodeId x) const;
    Packed own_extremes(NodeId x) const;
    Packed effective(NodeId x) const;
    void refresh_up(NodeId x);
    std::uint64_t weight(NodeId x) const;
    bool pair_eligible(std::size_t q) const { return nodes_[q].in_min && nodes_[q + 1].in_max; }
    void refresh(NodeId x);
    void remove_pair(NodeId q);
    Reversal locate_and_reverse(const IdentityPair& pair);
    std::optional<IdentityPair> scan_good();
    std::uint32_t size_of(NodeId x) const { return x == nil ? 0 : nodes_[x].size; }
    void push(NodeId x);
    void pull(NodeId x);
    void push_path(NodeId x);
    void rotate_up(NodeId x, bool pull_x);
    void splay_node(NodeId x);
    NodeId nth(NodeId root, std::size_t k);
    void set_eligibility(NodeId x, bool in_max, bool in_min);
    NodeId build(const std::vector<Element>& elems, std::size_t lo, std::size_t hi, NodeId parent);
    void reverse_range(Reversal r);
    NodeId node_of(Element value) const;

    std::size_t n_ = 0;
    std::vector<Node, detail::PageAllocator<Node>> nodes_;
    std::vector<std::uint64_t> key_;  // per pair (q, q+1)
    std::vector<NodeId> path_;        // scratch for push_path
    std::size_t eligible_pairs_ = 0;
    NodeId root_ = nil;
    std::uint64_t rotations_ = 0;
    std::uint64_t fallback_scans_ = 0;
    EligibilityUpdate policy_ = EligibilityUpdate::all_created;
};

}  // namespace signrev
