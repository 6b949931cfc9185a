#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "signrev/permutation.hpp"
#include "signrev/reversal_tree.hpp"

namespace signrev {

struct SortingScenario {
    /// Reversals that clear bad components; they need not be good.
    std::vector<Reversal> prefix;
    /// Good pairs applied after the prefix, in order.
    std::vector<IdentityPair> pairs;
    /// Position reversals the pairs produce when replayed.
    std::vector<Reversal> reversals;
    SignedPermutation final_permutation;

    std::size_t length() const { return prefix.size() + pairs.size(); }
};

/// A good pair together with the reversal it produced when it was applied.
struct AppliedPair {
    IdentityPair pair;
    Reversal reversal;
};

struct SolverOptions {
    /// Verify recovery properties against array recomputations. Linear work per
    /// check; meant for small inputs.
    bool checks = false;
    /// Receives one line per apply/undo/recurse/insert event.
    std::function<void(const std::string&)> trace;
};

struct SolverStats {
    std::size_t applies = 0;
    std::size_t undos = 0;
    std::size_t recursions = 0;
    std::size_t max_depth = 0;
    std::size_t fallback_scans = 0;  // find_good calls the extremes could not answer
    // Recovery stops, and those where no restricted negative is left or
    // where neither the M- nor the m- candidate at the root is good.
    std::size_t recovery_stops = 0;
    std::size_t stops_without_negative = 0;
    std::size_t stops_missed_by_extremes = 0;
    // States undone past (no eligible good pair) where one of those
    // candidates is nevertheless good.
    std::size_t undone_states = 0;
    std::size_t undone_states_passed_by_extremes = 0;
    // Same root test with Q taken from the stuck state's bad components
    // (all but the smallest element for Q_M, all but the largest for Q_m).
    // Counted only with checks on.
    std::size_t stops_missed_by_component_sets = 0;
    std::size_t undone_states_passed_by_component_sets = 0;
};

SortingScenario sort_signed_permutation(const SignedPermutation& p, const SolverOptions& options = {},
                                        SolverStats* stats = nullptr);

/// Pairs that sort the tree's permutation, assuming it has no bad component
/// (or is a recovery state). The tree is left at an unspecified permutation;
/// eligibility flags keep what the search removed.
std::vector<IdentityPair> sort_good_tree(RevTree& t, const SolverOptions& options = {}, SolverStats* stats = nullptr);

/// Applies the tree's candidate pairs until no eligible pair is good.
std::vector<AppliedPair> do_good(RevTree& t);

/// Undoes the tail of s while no eligible pair is good; s keeps the
/// prefix, the undone tail is returned in its original order.
std::vector<AppliedPair> recover(RevTree& t, std::vector<AppliedPair>& s);

/// Replays pairs through a tree in O((n + |pairs|) log n). Throws ReplayError
/// on a pair that is not good when reached.
ReplayResult replay_pairs_fast(const SignedPermutation& p, const std::vector<IdentityPair>& pairs);

}  // namespace signrev
