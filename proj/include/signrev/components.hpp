#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "signrev/permutation.hpp"

namespace signrev {

/// A framed common interval: (a ... b) or (-b ... -a) occupying positions
/// start_pos..end_pos, whose interior holds exactly the values a+1..b-1, and
/// which is not a union of shorter intervals of the same kind.
struct FramedInterval {
    std::size_t start_pos = 0;
    std::size_t end_pos = 0;
    Element frame_lo = 0;  // a
    Element frame_hi = 0;  // b
    bool reversed_frame = false;

    friend bool operator==(const FramedInterval&, const FramedInterval&) = default;
};

enum class ComponentKind { trivial, good, bad };

const char* to_string(ComponentKind kind);

struct Component {
    FramedInterval interval;
    /// Frame elements plus interior elements not inside a nested interval,
    /// signed and in position order.
    std::vector<Element> elements;
    /// Index of the component whose interval directly encloses this one.
    std::optional<std::size_t> parent;
    ComponentKind kind = ComponentKind::trivial;
};

struct ComponentForest {
    std::vector<Component> components;  // ordered by start position

    bool has_bad() const;
    std::size_t count(ComponentKind kind) const;
};

/// All framed common intervals, ordered by start position. Linear time.
std::vector<FramedInterval> framed_intervals(const SignedPermutation& p);

ComponentForest find_components(const SignedPermutation& p);
bool has_bad_component(const SignedPermutation& p);

/// JSON array with one object per component: elements, kind, frame, parent.
std::string components_to_json(const ComponentForest& forest);

/// The pair (Q_M, Q_m) of elements still eligible as the larger (resp.
/// smaller) member of a good pair: q is in Q_M iff the adjacency (q-1, q) is
/// absent, and in Q_m iff the adjacency (q, q+1) is absent.
class EligibleSets {
public:
    EligibleSets() = default;
    /// Both sets full: Q_M = {1..n+1}, Q_m = {0..n}.
    static EligibleSets full(std::size_t n);

    std::size_t size() const { return n_; }
    bool in_max(Element q) const;
    bool in_min(Element q) const;
    void erase_max(Element q);
    void erase_min(Element q);
    /// Removes the entries made stale by the adjacency (q, q+1).
    void erase_adjacency(Element q);

    std::vector<Element> max_members() const;
    std::vector<Element> min_members() const;

    friend bool operator==(const EligibleSets&, const EligibleSets&) = default;

private:
    std::size_t n_ = 0;
    std::vector<bool> max_;  // indexed 0..n+1
    std::vector<bool> min_;
};

EligibleSets eligible_sets(const SignedPermutation& p);

struct ClearingResult {
    std::vector<Reversal> reversals;
    SignedPermutation result;
};

/// Reversals that remove every bad component without losing optimality:
/// reversals.size() + d(result) == d(p). Empty when p has no bad component.
ClearingResult clear_bad_components(const SignedPermutation& p);

namespace detail {

/// Cycles of the breakpoint graph, adjacencies counted as cycles.
std::size_t cycle_count(const SignedPermutation& p);
/// Extra reversals forced by the bad components, computed on the nesting
/// tree of components restricted to the smallest subtree spanning them.
std::size_t bad_component_cost(const ComponentForest& forest);

}  // namespace detail

}  // namespace signrev
