#pragma once

// Test-side oracles. Nothing here calls into the library except to build
// values, so the checks stay independent of the code under test.

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "signrev/permutation.hpp"

namespace oracle {

using signrev::Element;
using Seq = std::vector<Element>;  // extended form, 0 .. n+1

inline Seq flip(Seq v, std::size_t i, std::size_t j) {
    std::reverse(v.begin() + static_cast<std::ptrdiff_t>(i), v.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    for (std::size_t k = i; k <= j; ++k) v[k] = -v[k];
    return v;
}

inline Seq extended(const signrev::SignedPermutation& p) { return {p.elements().begin(), p.elements().end()}; }

inline signrev::SignedPermutation make(const Seq& ext) { return signrev::SignedPermutation::from_extended(ext); }

inline Seq identity(std::size_t n) {
    Seq v(n + 2);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = static_cast<Element>(k);
    return v;
}

// Plain Fisher-Yates over a separate engine, not the library generator.
inline Seq random_signed(std::mt19937_64& rng, std::size_t n) {
    Seq v = identity(n);
    for (std::size_t k = n; k > 1; --k) {
        std::uniform_int_distribution<std::size_t> pick(1, k);
        std::swap(v[k], v[pick(rng)]);
    }
    for (std::size_t k = 1; k <= n; ++k)
        if (rng() & 1) v[k] = -v[k];
    return v;
}

inline std::size_t count_adjacencies(const Seq& v) {
    std::size_t c = 0;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) c += v[k + 1] - v[k] == 1;
    return c;
}

inline std::size_t position(const Seq& v, Element magnitude) {
    for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k] == magnitude || v[k] == -magnitude) return k;
    return v.size();
}

// Every (first, last) whose reversal turns the pair (q, q+1) into an adjacency.
inline std::vector<std::pair<std::size_t, std::size_t>> joining_reversals(const Seq& v, Element q) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t n = v.size() - 2;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = i; j <= n; ++j) {
            const Seq w = flip(v, i, j);
            const std::size_t a = position(w, q);
            const std::size_t b = position(w, q + 1);
            const bool joined = (b == a + 1 && w[b] - w[a] == 1) || (a == b + 1 && w[a] - w[b] == 1);
            if (joined) out.emplace_back(i, j);
        }
    }
    return out;
}

// Breakpoint graph cycles, adjacencies included, on the unsigned 2n+2 image.
inline std::size_t cycles(const Seq& v) {
    const std::size_t n = v.size() - 2;
    std::vector<std::int64_t> u;  // 0, 2|x|-1 2|x| or reversed, ..., 2n+1
    u.push_back(0);
    for (std::size_t k = 1; k <= n; ++k) {
        const std::int64_t a = v[k] < 0 ? -v[k] : v[k];
        if (v[k] > 0) {
            u.push_back(2 * a - 1);
            u.push_back(2 * a);
        } else {
            u.push_back(2 * a);
            u.push_back(2 * a - 1);
        }
    }
    u.push_back(2 * static_cast<std::int64_t>(n) + 1);
    const std::size_t m = u.size();
    std::vector<std::size_t> at(m);
    for (std::size_t k = 0; k < m; ++k) at[static_cast<std::size_t>(u[k])] = k;
    std::vector<bool> seen(m, false);
    std::size_t count = 0;
    for (std::size_t s = 0; s < m; s += 2) {
        if (seen[s]) continue;
        ++count;
        std::size_t k = s;
        while (!seen[k]) {
            // black edge pairs positions 2i, 2i+1; grey edge joins values 2i, 2i+1
            seen[k] = true;
            const std::size_t partner = k ^ 1;
            seen[partner] = true;
            const std::int64_t val = u[partner];
            k = at[static_cast<std::size_t>(val ^ 1)];
        }
    }
    return count;
}

// Exact distances by BFS over a hash map, for tiny n.
inline std::map<Seq, int> bfs(std::size_t n) {
    std::map<Seq, int> dist;
    std::queue<Seq> todo;
    dist[identity(n)] = 0;
    todo.push(identity(n));
    while (!todo.empty()) {
        const Seq v = todo.front();
        todo.pop();
        const int d = dist[v];
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = i; j <= n; ++j) {
                Seq w = flip(v, i, j);
                if (dist.emplace(w, d + 1).second) todo.push(std::move(w));
            }
    }
    return dist;
}

inline std::vector<Seq> all_signed(std::size_t n) {
    std::vector<Seq> out;
    Seq base = identity(n);
    std::vector<Element> perm(base.begin() + 1, base.end() - 1);
    do {
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            Seq v = identity(n);
            for (std::size_t k = 0; k < n; ++k) v[k + 1] = (mask >> k & 1) ? -perm[k] : perm[k];
            out.push_back(v);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

}  // namespace oracle
