#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "signrev/permutation.hpp"
#include "signrev/solver.hpp"

namespace signrev {

/// Thrown when an exhaustive table is requested for too large an n.
class ResourceGuardError : public std::length_error {
public:
    using std::length_error::length_error;
};

inline constexpr std::size_t max_table_size = 7;

/// Exact reversal distance of every signed permutation of a fixed n.
class DistanceTable {
public:
    DistanceTable() = default;

    std::size_t size() const { return n_; }
    std::size_t entries() const { return dist_.size(); }
    std::uint8_t distance(const SignedPermutation& p) const;
    std::uint8_t distance_at(std::uint64_t rank) const { return dist_[rank]; }

    /// Lehmer rank of the absolute values times 2^n plus the sign bits
    /// (bit k set when the element at position k+1 is negative).
    static std::uint64_t rank(const SignedPermutation& p);
    static SignedPermutation unrank(std::size_t n, std::uint64_t rank);

    /// Binary format: "SRDT" magic, version byte 1, n as one byte, then one
    /// distance byte per rank.
    void save(const std::filesystem::path& file) const;
    static std::optional<DistanceTable> load(const std::filesystem::path& file, std::size_t n);

private:
    friend DistanceTable bfs_distance_table(std::size_t n);
    std::size_t n_ = 0;
    std::vector<std::uint8_t> dist_;
};

/// Breadth-first search from the identity over all reversals. n <= 7.
DistanceTable bfs_distance_table(std::size_t n);
/// Same, reading or writing `cache_dir/signrev-bfs-<n>.bin`.
DistanceTable cached_distance_table(std::size_t n, const std::filesystem::path& cache_dir);

/// Name recorded in generated output headers.
inline constexpr const char* generator_name = "mt19937_64+fisher-yates/v1";

/// Uniform signed permutation; identical seeds give identical output on
/// every platform.
SignedPermutation random_permutation(std::size_t n, std::uint64_t seed);

struct VerificationReport {
    bool sorts_to_identity = false;
    bool all_reversals_good = false;
    std::size_t length = 0;
    std::optional<bool> optimal;
    std::string failure;  // first failing check, empty when none

    bool passed() const { return sorts_to_identity && all_reversals_good && optimal.value_or(true); }
};

/// Applies the prefix (no goodness required), then the pairs, and compares
/// the length with the table when one matches p's size.
VerificationReport verify_scenario(const SignedPermutation& p, const std::vector<Reversal>& prefix,
                                   const std::vector<IdentityPair>& pairs, const DistanceTable* table = nullptr);
VerificationReport verify_scenario(const SignedPermutation& p, const SortingScenario& s,
                                   const DistanceTable* table = nullptr);
/// Position reversals only: the prefix is the leading run applied while a
/// bad component is present, every later reversal must be good.
VerificationReport verify_reversals(const SignedPermutation& p, const std::vector<Reversal>& reversals,
                                    const DistanceTable* table = nullptr);

}  // namespace signrev
