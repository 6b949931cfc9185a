#include "signrev/oracle.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <random>

#include "signrev/components.hpp"

namespace signrev {

namespace {

constexpr std::array<char, 4> magic{'S', 'R', 'D', 'T'};
constexpr std::uint8_t format_version = 1;
constexpr std::uint8_t unreached = 0xFF;

std::uint64_t factorial(std::size_t n) {
    std::uint64_t f = 1;
    for (std::size_t k = 2; k <= n; ++k) f *= k;
    return f;
}

// Interior elements only, as small signed values.
using Small = std::array<std::int8_t, max_table_size>;

std::uint64_t rank_small(const Small& v, std::size_t n) {
    std::uint64_t lehmer = 0;
    std::uint64_t signs = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const int a = v[k] < 0 ? -v[k] : v[k];
        std::uint64_t smaller_after = 0;
        for (std::size_t m = k + 1; m < n; ++m)
            if ((v[m] < 0 ? -v[m] : v[m]) < a) ++smaller_after;
        lehmer = lehmer * (n - k) + smaller_after;
        if (v[k] < 0) signs |= std::uint64_t{1} << k;
    }
    return (lehmer << n) | signs;
}

Small unrank_small(std::size_t n, std::uint64_t rank) {
    const std::uint64_t signs = rank & ((std::uint64_t{1} << n) - 1);
    std::uint64_t lehmer = rank >> n;
    std::vector<std::uint64_t> digits(n);
    for (std::size_t k = n; k-- > 0;) {
        digits[k] = lehmer % (n - k);
        lehmer /= (n - k);
    }
    std::vector<int> pool(n);
    for (std::size_t k = 0; k < n; ++k) pool[k] = static_cast<int>(k + 1);
    Small v{};
    for (std::size_t k = 0; k < n; ++k) {
        const int a = pool[digits[k]];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digits[k]));
        v[k] = static_cast<std::int8_t>((signs >> k) & 1u ? -a : a);
    }
    return v;
}

// Uniform value in [0, bound) by rejection, independent of the standard
// library's distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    while (true) {
        const std::uint64_t x = rng();
        if (x < limit) return x % bound;
    }
}

}  // namespace

std::uint64_t DistanceTable::rank(const SignedPermutation& p) {
    const std::size_t n = p.size();
    if (n > max_table_size) throw ResourceGuardError("rank is defined for n <= 7");
    Small v{};
    for (std::size_t k = 0; k < n; ++k) v[k] = static_cast<std::int8_t>(p[k + 1]);
    return rank_small(v, n);
}

SignedPermutation DistanceTable::unrank(std::size_t n, std::uint64_t rank) {
    if (n > max_table_size) throw ResourceGuardError("unrank is defined for n <= 7");
    const Small v = unrank_small(n, rank);
    return SignedPermutation::from_interior(std::vector<Element>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)));
}

std::uint8_t DistanceTable::distance(const SignedPermutation& p) const {
    if (p.size() != n_) throw std::invalid_argument("table holds n = " + std::to_string(n_));
    return dist_[rank(p)];
}

DistanceTable bfs_distance_table(std::size_t n) {
    if (n > max_table_size) {
        throw ResourceGuardError("exhaustive table for n = " + std::to_string(n) + " exceeds the limit of " +
                                 std::to_string(max_table_size));
    }
    DistanceTable t;
    t.n_ = n;
    const std::uint64_t states = factorial(n) << n;
    t.dist_.assign(states, unreached);

    Small id{};
    for (std::size_t k = 0; k < n; ++k) id[k] = static_cast<std::int8_t>(k + 1);
    std::vector<std::uint64_t> frontier{rank_small(id, n)};
    t.dist_[frontier.front()] = 0;
    std::uint8_t level = 0;
    while (!frontier.empty()) {
        std::vector<std::uint64_t> next;
        ++level;
        for (std::uint64_t r : frontier) {
            const Small v = unrank_small(n, r);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) {
                    Small w = v;
                    std::reverse(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(j) + 1);
                    for (std::size_t k = i; k <= j; ++k) w[k] = static_cast<std::int8_t>(-w[k]);
                    const std::uint64_t s = rank_small(w, n);
                    if (t.dist_[s] == unreached) {
                        t.dist_[s] = level;
                        next.push_back(s);
                    }
                }
            }
        }
        frontier = std::move(next);
    }
    return t;
}

void DistanceTable::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out.write(magic.data(), magic.size());
    const char header[2] = {static_cast<char>(format_version), static_cast<char>(n_)};
    out.write(header, 2);
    out.write(reinterpret_cast<const char*>(dist_.data()), static_cast<std::streamsize>(dist_.size()));
    if (!out) throw std::runtime_error("cannot write " + file.string());
}

std::optional<DistanceTable> DistanceTable::load(const std::filesystem::path& file, std::size_t n) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    std::array<char, 4> m{};
    char header[2] = {0, 0};
    in.read(m.data(), m.size());
    in.read(header, 2);
    if (!in || m != magic || static_cast<std::uint8_t>(header[0]) != format_version ||
        static_cast<std::size_t>(static_cast<std::uint8_t>(header[1])) != n) {
        return std::nullopt;
    }
    DistanceTable t;
    t.n_ = n;
    t.dist_.resize(factorial(n) << n);
    in.read(reinterpret_cast<char*>(t.dist_.data()), static_cast<std::streamsize>(t.dist_.size()));
    if (in.gcount() != static_cast<std::streamsize>(t.dist_.size()) || in.peek() != std::ifstream::traits_type::eof()) {
        return std::nullopt;
    }
    return t;
}

DistanceTable cached_distance_table(std::size_t n, const std::filesystem::path& cache_dir) {
    const auto file = cache_dir / ("signrev-bfs-" + std::to_string(n) + ".bin");
    if (auto t = DistanceTable::load(file, n)) return *t;
    DistanceTable t = bfs_distance_table(n);
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    if (!ec) {
        try {
            t.save(file);
        } catch (const std::runtime_error&) {
            // A read-only cache location only costs recomputation.
        }
    }
    return t;
}

SignedPermutation random_permutation(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Element> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = static_cast<Element>(k + 1);
    for (std::size_t k = n; k > 1; --k) std::swap(v[k - 1], v[bounded(rng, k)]);
    for (std::size_t k = 0; k < n; k += 64) {
        const std::uint64_t bits = rng();
        for (std::size_t b = 0; b < 64 && k + b < n; ++b)
            if ((bits >> b) & 1u) v[k + b] = -v[k + b];
    }
    return SignedPermutation::from_interior(v);
}

namespace {

void compare_with_table(VerificationReport& report, const SignedPermutation& p, const DistanceTable* table) {
    if (table == nullptr || table->size() != p.size()) return;
    const std::size_t d = table->distance(p);
    report.optimal = report.sorts_to_identity && report.length == d;
    if (!*report.optimal && report.failure.empty()) {
        report.failure = "optimal: length " + std::to_string(report.length) + " but distance is " + std::to_string(d);
    }
}

}  // namespace

VerificationReport verify_scenario(const SignedPermutation& p, const std::vector<Reversal>& prefix,
                                   const std::vector<IdentityPair>& pairs, const DistanceTable* table) {
    VerificationReport report;
    report.length = prefix.size() + pairs.size();
    SignedPermutation cur = p;
    try {
        for (const Reversal& r : prefix) cur.reverse_in_place(r);
    } catch (const std::out_of_range& e) {
        report.failure = std::string("prefix: ") + e.what();
        return report;
    }
    try {
        cur = replay_pairs(cur, pairs).result;
        report.all_reversals_good = true;
    } catch (const ReplayError& e) {
        report.failure = std::string("all_reversals_good: ") + e.what();
        return report;
    }
    report.sorts_to_identity = is_identity(cur);
    if (!report.sorts_to_identity) report.failure = "sorts_to_identity: ends at " + format_extended(cur);
    compare_with_table(report, p, table);
    return report;
}

VerificationReport verify_scenario(const SignedPermutation& p, const SortingScenario& s, const DistanceTable* table) {
    return verify_scenario(p, s.prefix, s.pairs, table);
}

VerificationReport verify_reversals(const SignedPermutation& p, const std::vector<Reversal>& reversals,
                                    const DistanceTable* table) {
    VerificationReport report;
    report.length = reversals.size();
    report.all_reversals_good = true;
    SignedPermutation cur = p;
    bool clearing = true;
    for (std::size_t step = 0; step < reversals.size(); ++step) {
        const Reversal r = reversals[step];
        try {
            check_reversal(cur.size(), r);
        } catch (const std::out_of_range& e) {
            report.all_reversals_good = false;
            report.failure = "reversal " + std::to_string(step) + ": " + e.what();
            return report;
        }
        if (clearing) clearing = has_bad_component(cur);
        if (!clearing) {
            const Element a = cur[r.first], b = cur[r.last + 1];
            const Element c = cur[r.first - 1], d = cur[r.last];
            const bool good = ((a < 0) != (b < 0) && a + b == 1) || ((c < 0) != (d < 0) && c + d == -1);
            if (!good && report.all_reversals_good) {
                report.all_reversals_good = false;
                report.failure = "all_reversals_good: reversal " + std::to_string(step) + " (" +
                                 std::to_string(r.first) + " " + std::to_string(r.last) + ") is not good";
            }
        }
        cur.reverse_in_place(r);
    }
    report.sorts_to_identity = is_identity(cur);
    if (!report.sorts_to_identity && report.failure.empty()) {
        report.failure = "sorts_to_identity: ends at " + format_extended(cur);
    }
    compare_with_table(report, p, table);
    return report;
}

}  // namespace signrev
