#include "signrev/permutation.hpp"

#include <algorithm>
#include <charconv>
#include <utility>

namespace signrev {

namespace {

Element magnitude(Element x) { return x < 0 ? -x : x; }

std::string describe(Element a, Element b) {
    return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

}  // namespace

IdentityPair::IdentityPair(Element a, Element b) {
    if (magnitude(a) > magnitude(b)) std::swap(a, b);
    if (magnitude(b) - magnitude(a) != 1) {
        throw InvalidPairError("not an identity pair: " + describe(a, b));
    }
    lo = a;
    hi = b;
}

SignedPermutation SignedPermutation::from_interior(std::span<const Element> interior) {
    const auto n = interior.size();
    std::vector<Element> elems;
    elems.reserve(n + 2);
    elems.push_back(0);
    std::vector<bool> seen(n + 1, false);
    for (Element x : interior) {
        const Element m = magnitude(x);
        if (m < 1 || static_cast<std::size_t>(m) > n) {
            throw std::invalid_argument("element " + std::to_string(x) + " outside 1.." +
                                        std::to_string(n));
        }
        if (seen[m]) throw std::invalid_argument("element " + std::to_string(m) + " repeated");
        seen[m] = true;
        elems.push_back(x);
    }
    elems.push_back(static_cast<Element>(n + 1));
    return SignedPermutation(std::move(elems));
}

SignedPermutation SignedPermutation::from_extended(std::span<const Element> extended) {
    if (extended.size() < 2 || extended.front() != 0 ||
        extended.back() != static_cast<Element>(extended.size() - 1)) {
        throw std::invalid_argument("extended permutation must start with 0 and end with n+1");
    }
    return from_interior(extended.subspan(1, extended.size() - 2));
}

SignedPermutation SignedPermutation::identity(std::size_t n) {
    std::vector<Element> elems(n + 2);
    for (std::size_t k = 0; k < elems.size(); ++k) elems[k] = static_cast<Element>(k);
    return SignedPermutation(std::move(elems));
}

std::vector<std::size_t> SignedPermutation::positions() const {
    std::vector<std::size_t> pos(elems_.size());
    for (std::size_t k = 0; k < elems_.size(); ++k) pos[magnitude(elems_[k])] = k;
    return pos;
}

void SignedPermutation::reverse_in_place(Reversal r) {
    check_reversal(size(), r);
    std::reverse(elems_.begin() + static_cast<std::ptrdiff_t>(r.first),
                 elems_.begin() + static_cast<std::ptrdiff_t>(r.last) + 1);
    for (std::size_t k = r.first; k <= r.last; ++k) elems_[k] = -elems_[k];
}

void check_reversal(std::size_t n, Reversal r) {
    if (r.first < 1 || r.first > r.last || r.last > n) {
        throw std::out_of_range("reversal (" + std::to_string(r.first) + ", " +
                                std::to_string(r.last) + ") outside 1.." + std::to_string(n));
    }
}

SignedPermutation apply_reversal(const SignedPermutation& p, Reversal r) {
    SignedPermutation out = p;
    out.reverse_in_place(r);
    return out;
}

Reversal mu_at(Element a, std::size_t pos_a, Element b, std::size_t pos_b) {
    const IdentityPair pair(a, b);
    if (!pair.good()) throw InvalidPairError("pair is not good: " + describe(a, b));
    if (pos_a > pos_b) {
        std::swap(a, b);
        std::swap(pos_a, pos_b);
    }
    if (a + b == 1) return {pos_a, pos_b - 1};
    return {pos_a + 1, pos_b};
}

Reversal mu(const SignedPermutation& p, Element a, Element b) {
    const auto n = static_cast<Element>(p.size());
    if (magnitude(a) > n + 1 || magnitude(b) > n + 1) {
        throw InvalidPairError("element outside permutation: " + describe(a, b));
    }
    const auto pos = p.positions();
    const std::size_t pa = pos[magnitude(a)];
    const std::size_t pb = pos[magnitude(b)];
    if (p[pa] != a || p[pb] != b) {
        throw InvalidPairError("signs do not match permutation: " + describe(a, b));
    }
    return mu_at(a, pa, b, pb);
}

std::vector<IdentityPair> good_pairs(const SignedPermutation& p) {
    const auto pos = p.positions();
    std::vector<IdentityPair> out;
    for (std::size_t q = 0; q + 1 < pos.size(); ++q) {
        const Element a = p[pos[q]];
        const Element b = p[pos[q + 1]];
        if ((a < 0) != (b < 0)) out.emplace_back(a, b);
    }
    return out;
}

bool is_adjacency(Element left, Element right) { return right - left == 1; }

std::vector<Element> adjacencies(const SignedPermutation& p) {
    std::vector<Element> out;
    const auto e = p.elements();
    for (std::size_t k = 0; k + 1 < e.size(); ++k) {
        if (is_adjacency(e[k], e[k + 1])) out.push_back(std::min(magnitude(e[k]), magnitude(e[k + 1])));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool is_identity(const SignedPermutation& p) {
    const auto e = p.elements();
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] != static_cast<Element>(k)) return false;
    }
    return true;
}

std::vector<Element> restrict_to(const SignedPermutation& p, const std::vector<bool>& keep) {
    std::vector<Element> out;
    for (Element x : p.elements()) {
        const auto m = static_cast<std::size_t>(magnitude(x));
        if (m < keep.size() && keep[m]) out.push_back(x);
    }
    return out;
}

std::vector<Element> restrict_to(const SignedPermutation& p, std::span<const Element> values) {
    std::vector<bool> keep(p.size() + 2, false);
    for (Element v : values) {
        const auto m = static_cast<std::size_t>(magnitude(v));
        if (m < keep.size()) keep[m] = true;
    }
    return restrict_to(p, keep);
}

ReplayResult replay_pairs(SignedPermutation p, std::span<const IdentityPair> pairs) {
    ReplayResult out{{}, {}};
    out.reversals.reserve(pairs.size());
    auto pos = p.positions();
    for (std::size_t step = 0; step < pairs.size(); ++step) {
        const IdentityPair& pair = pairs[step];
        const auto lo = static_cast<std::size_t>(magnitude(pair.lo));
        const auto hi = static_cast<std::size_t>(magnitude(pair.hi));
        if (hi >= pos.size()) throw ReplayError("pair " + std::to_string(step) + " outside permutation");
        const Element a = p[pos[lo]];
        const Element b = p[pos[hi]];
        if ((a < 0) == (b < 0)) {
            throw ReplayError("pair " + std::to_string(step) + " " + describe(a, b) +
                              " is not good when reached");
        }
        const Reversal r = mu_at(a, pos[lo], b, pos[hi]);
        p.reverse_in_place(r);
        for (std::size_t k = r.first; k <= r.last; ++k) pos[magnitude(p[k])] = k;
        out.reversals.push_back(r);
    }
    out.result = std::move(p);
    return out;
}

SignedPermutation parse_permutation(std::string_view text) {
    std::vector<Element> values;
    std::size_t k = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ','; };
    while (k < text.size()) {
        while (k < text.size() && is_space(text[k])) ++k;
        if (k == text.size()) break;
        std::size_t end = k;
        while (end < text.size() && !is_space(text[end])) ++end;
        std::string_view token = text.substr(k, end - k);
        std::string_view digits = token;
        if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
        Element value = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
            throw ParseError("invalid token '" + std::string(token) + "'");
        }
        values.push_back(value);
        k = end;
    }
    try {
        return SignedPermutation::from_interior(values);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

std::string format_interior(const SignedPermutation& p) {
    std::string out;
    for (Element x : p.interior()) {
        if (!out.empty()) out += ' ';
        out += std::to_string(x);
    }
    return out;
}

std::string format_extended(const SignedPermutation& p) {
    std::string out = "(";
    for (Element x : p.elements()) {
        if (out.size() > 1) out += ' ';
        out += std::to_string(x);
    }
    return out + ")";
}

}  // namespace signrev
