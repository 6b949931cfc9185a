#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace signrev {

using Element = std::int64_t;

/// Thrown when text input does not describe a valid signed permutation.
class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a pair handed to mu() or a tree is not a good identity pair.
class InvalidPairError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown by replay when a pair is not good at the moment it is reached.
class ReplayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reversal of the positions first..last (inclusive) of an extended permutation.
/// Positions are 0-based over (0 p1 ... pn n+1), so 1 <= first <= last <= n.
struct Reversal {
    std::size_t first = 0;
    std::size_t last = 0;

    friend bool operator==(const Reversal&, const Reversal&) = default;
};

/// Two elements whose absolute values differ by one, stored with their signs
/// as they appear in some permutation.
struct IdentityPair {
    Element lo = 0;  // element with the smaller absolute value
    Element hi = 0;

    IdentityPair() = default;
    /// Orders the two values by absolute value; throws InvalidPairError if
    /// they are not consecutive in the identity.
    IdentityPair(Element a, Element b);

    bool good() const { return (lo < 0) != (hi < 0); }
    /// The pair (q, q+1) this identity pair names, i.e. q = |lo|.
    Element index() const { return lo < 0 ? -lo : lo; }

    friend bool operator==(const IdentityPair&, const IdentityPair&) = default;
};

/// A signed permutation in extended form (0 p1 ... pn n+1).
class SignedPermutation {
public:
    SignedPermutation() : elems_{0, 1} {}

    /// Builds from the interior elements p1..pn. Throws std::invalid_argument
    /// if the absolute values are not exactly {1..n}.
    static SignedPermutation from_interior(std::span<const Element> interior);
    /// Builds from a full extended sequence starting with 0 and ending with n+1.
    static SignedPermutation from_extended(std::span<const Element> extended);
    static SignedPermutation identity(std::size_t n);

    std::size_t size() const { return elems_.size() - 2; }
    Element operator[](std::size_t pos) const { return elems_[pos]; }
    std::span<const Element> elements() const { return elems_; }
    std::span<const Element> interior() const {
        return std::span<const Element>(elems_).subspan(1, size());
    }

    /// Position of every absolute value, indexed 0..n+1.
    std::vector<std::size_t> positions() const;

    void reverse_in_place(Reversal r);

    friend bool operator==(const SignedPermutation&, const SignedPermutation&) = default;

private:
    explicit SignedPermutation(std::vector<Element> elems) : elems_(std::move(elems)) {}

    std::vector<Element> elems_;
};

/// Throws std::out_of_range unless 1 <= r.first <= r.last <= n.
void check_reversal(std::size_t n, Reversal r);

SignedPermutation apply_reversal(const SignedPermutation& p, Reversal r);

/// The good reversal induced by the good pair (a, b); the two values may be
/// given in either order.
Reversal mu(const SignedPermutation& p, Element a, Element b);
/// Same as mu(), with the positions of a and b already known.
Reversal mu_at(Element a, std::size_t pos_a, Element b, std::size_t pos_b);

/// Every good identity pair of p, ordered by the smaller absolute value.
std::vector<IdentityPair> good_pairs(const SignedPermutation& p);

/// Every q such that (q, q+1) forms an adjacency, in increasing order.
std::vector<Element> adjacencies(const SignedPermutation& p);
bool is_adjacency(Element left, Element right);

bool is_identity(const SignedPermutation& p);

/// Subsequence of p whose absolute values belong to keep (indexed by absolute
/// value; values beyond keep.size() are dropped).
std::vector<Element> restrict_to(const SignedPermutation& p, const std::vector<bool>& keep);
std::vector<Element> restrict_to(const SignedPermutation& p, std::span<const Element> values);

struct ReplayResult {
    std::vector<Reversal> reversals;
    SignedPermutation result;
};

/// Applies each pair through mu() in order. Throws ReplayError on the first
/// pair that is not good when reached.
ReplayResult replay_pairs(SignedPermutation p, std::span<const IdentityPair> pairs);

/// Whitespace separated interior elements, e.g. "-2 3 1 4".
SignedPermutation parse_permutation(std::string_view text);
std::string format_interior(const SignedPermutation& p);
std::string format_extended(const SignedPermutation& p);

}  // namespace signrev
