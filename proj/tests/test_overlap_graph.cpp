#include <doctest.h>

#include "properties.hpp"
#include "signrev/overlap_graph.hpp"

using namespace signrev;

namespace {

const oracle::Seq fig2_pi{0, -5, -2, -4, -7, -9, -10, -6, 1, 3, 8, 11};
const oracle::Seq fig2_pi_prime{0, -5, -2, -4, -3, -1, 6, 10, 9, 7, 8, 11};

// Overlap oracle: intervals between the right end of q and the left end of
// q+1 in the doubled unsigned image, overlapping without nesting.
OverlapGraph overlap_oracle(const oracle::Seq& v) {
    const std::size_t n = v.size() - 2;
    std::vector<std::size_t> right(n + 2), left(n + 2);
    for (std::size_t k = 0; k < v.size(); ++k) {
        const std::size_t a = static_cast<std::size_t>(v[k] < 0 ? -v[k] : v[k]);
        // positive x occupies (2k: x-, 2k+1: x+); negative flips the two
        right[a] = v[k] < 0 ? 2 * k : 2 * k + 1;
        left[a] = v[k] < 0 ? 2 * k + 1 : 2 * k;
    }
    OverlapGraph g(n + 1);
    std::vector<std::pair<std::size_t, std::size_t>> iv(n + 1);
    for (std::size_t q = 0; q <= n; ++q) {
        iv[q] = std::minmax(right[q], left[q + 1]);
        g.set_good(q, (v[oracle::position(v, static_cast<Element>(q))] < 0) !=
                          (v[oracle::position(v, static_cast<Element>(q + 1))] < 0));
    }
    for (std::size_t a = 0; a <= n; ++a)
        for (std::size_t b = a + 1; b <= n; ++b) {
            const auto [a0, a1] = iv[a];
            const auto [b0, b1] = iv[b];
            const bool cross = (a0 < b0 && b0 < a1 && a1 < b1) || (b0 < a0 && a0 < b1 && b1 < a1);
            g.set_edge(a, b, cross);
        }
    return g;
}

}  // namespace

TEST_CASE("overlap graph of pi prime") {
    const OverlapGraph g = OverlapGraph::build(oracle::make(fig2_pi_prime));
    CHECK(g.size() == 11);
    std::vector<std::vector<Vertex>> big;
    for (const auto& c : g.components())
        if (c.size() > 1) big.push_back(c);
    CHECK(big == std::vector<std::vector<Vertex>>{{0, 5}, {1, 2, 4}, {6, 8, 9, 10}});
    CHECK(g.good(0));
    CHECK(g.good(5));
    for (Vertex v : {1, 2, 3, 4, 6, 7, 8, 9, 10}) CHECK_FALSE(g.good(v));
    CHECK(g.degree(3) == 0);
    CHECK(g.degree(7) == 0);
}

TEST_CASE("build matches the interval oracle") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const oracle::Seq v = oracle::random_signed(rng, 1 + rng() % 16);
        CHECK(OverlapGraph::build(oracle::make(v)) == overlap_oracle(v));
    }
}

TEST_CASE("complementation commutes with good reversals") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 600; ++trial) {
        const oracle::Seq v = oracle::random_signed(rng, 1 + rng() % 10);
        const SignedPermutation p = oracle::make(v);
        const OverlapGraph h = OverlapGraph::build(p);
        for (const IdentityPair& g : good_pairs(p)) {
            const OverlapGraph after = OverlapGraph::build(apply_reversal(p, mu(p, g.lo, g.hi)));
            CHECK(after == h.complement(vertex_of(g)));
            props::Dense d(h);
            d.complement(vertex_of(g));
            CHECK(d.same_as(after));
        }
    }
}

TEST_CASE("complementation edge cases") {
    OverlapGraph h(3);
    h.set_edge(0, 1, true);
    h.set_edge(1, 2, true);
    h.set_good(1, true);
    CHECK_THROWS_AS(h.complement(0), std::invalid_argument);
    const OverlapGraph c = h.complement(1);
    CHECK(c.edge(0, 2));
    CHECK_FALSE(c.edge(0, 1));
    CHECK(c.good(0));
    CHECK(c.good(2));
    CHECK_FALSE(c.good(1));
    OverlapGraph w = h;
    const auto undo = w.complement_in_place(1);
    CHECK(w == c);
    w.uncomplement(undo);
    CHECK(w == h);
    CHECK(h.to_dot().find("0 -- 1") != std::string::npos);
    CHECK(h.induced({true, false, true}).size() == 2);
}

TEST_CASE("figure 1 sequence leaves isolated white vertices") {
    const SignedPermutation p = SignedPermutation::from_extended(std::vector<Element>{0, -2, 3, 1, 4});
    OverlapGraph g = OverlapGraph::build(p);
    for (Vertex v : {1, 3, 0}) g.complement_in_place(v);  // pairs (-2,1), (-3,4), (0,-1)
    for (Vertex v = 0; v < g.size(); ++v) {
        CHECK(g.degree(v) == 0);
        CHECK_FALSE(g.good(v));
    }
}

TEST_CASE("sort_graph small cases") {
    const OverlapGraph fig1 = OverlapGraph::build(SignedPermutation::from_extended(std::vector<Element>{0, -2, 3, 1, 4}));
    CHECK(sort_graph(fig1).sequence.size() == 3);
    CHECK(sort_graph(OverlapGraph(5)).sequence.empty());
    CHECK(sort_graph(OverlapGraph::build(parse_permutation("-1"))).sequence == std::vector<Vertex>{0});
    CHECK_THROWS_AS(sort_graph(OverlapGraph(3), VertexSet(2, true)), std::invalid_argument);
}

TEST_CASE("split analysis on figure 2") {
    // Vertices 3 and 7 are the two adjacencies the reversal creates: isolated
    // and bad, so trivial rather than part of a bad component.
    const OverlapGraph h = OverlapGraph::build(oracle::make(fig2_pi));
    const SplitAnalysis s7 = analyze_split(h, 7);
    CHECK(s7.bad == std::vector<Vertex>{1, 2, 4, 6, 8, 9, 10});
    CHECK(s7.good == std::vector<Vertex>{0, 3, 5});
    CHECK(s7.x == std::vector<Vertex>{0, 3, 5, 7});
    const SplitAnalysis s3 = analyze_split(h, 3);
    CHECK(s3.bad == s7.bad);
    CHECK(s3.good == std::vector<Vertex>{0, 5, 7});
    CHECK_THROWS_AS(analyze_split(h, 4), std::invalid_argument);
}

TEST_CASE("split analysis on two joined good vertices") {
    // Complementing either one isolates both as bad vertices: nothing unsafe.
    OverlapGraph h(2);
    h.set_good(0, true);
    h.set_good(1, true);
    h.set_edge(0, 1, true);
    const SplitAnalysis s = analyze_split(h, 0);
    CHECK(s.bad.empty());
    CHECK(s.good == std::vector<Vertex>{1});
    CHECK(s.x == std::vector<Vertex>{0, 1});
}

TEST_CASE("a safe complementation has no bad side") {
    // (0 -1 2): complementing the only good vertex isolates it.
    const OverlapGraph h = OverlapGraph::build(parse_permutation("-1"));
    CHECK(analyze_split(h, 0).bad.empty());
}

TEST_CASE("split properties on random graphs") {
    std::mt19937_64 rng(33);
    props::SplitCounts counts;
    for (int trial = 0; trial < 1500; ++trial) {
        const std::string r = props::split_trial(rng, counts);
        CHECK_MESSAGE(r.empty(), r);
    }
    CHECK(counts.unsafe > 50);
    CHECK(counts.even_sequences > 20);
}

TEST_CASE("sort_graph with checks on random graphs") {
    std::mt19937_64 rng(34);
    props::GraphCounts counts;
    for (int trial = 0; trial < 1500; ++trial) {
        const std::string r = props::graph_sort_trial(rng, counts);
        CHECK_MESSAGE(r.empty(), r);
    }
    CHECK(counts.recursions > 0);
}
