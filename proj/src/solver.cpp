#include "signrev/solver.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>

#include "signrev/components.hpp"

namespace signrev {

namespace {

Element magnitude(Element x) { return x < 0 ? -x : x; }

std::string pair_text(const IdentityPair& p) {
    return "(" + std::to_string(p.lo) + "," + std::to_string(p.hi) + ")";
}

std::string snapshot(const RevTree& t) {
    if (t.size() > 32) return "";
    return " " + format_extended(t.to_permutation());
}

// Some pair (q, q+1) still in Q has opposite signs.
bool has_good_eligible_pair(const SignedPermutation& p, const EligibleSets& q) {
    const auto pos = p.positions();
    for (std::size_t v = 0; v + 1 < pos.size(); ++v) {
        const Element a = static_cast<Element>(v);
        if (!q.in_min(a) || !q.in_max(a + 1)) continue;
        if ((p[pos[v]] < 0) != (p[pos[v + 1]] < 0)) return true;
    }
    return false;
}

// Element sets of the bad components of p.
std::set<std::vector<Element>> bad_sets(const SignedPermutation& p) {
    std::set<std::vector<Element>> out;
    for (const auto& c : find_components(p).components) {
        if (c.kind != ComponentKind::bad) continue;
        std::vector<Element> s;
        for (Element x : c.elements) s.push_back(magnitude(x));
        std::sort(s.begin(), s.end());
        out.insert(std::move(s));
    }
    return out;
}

// Q read off the bad components of a stuck state: every element of a bad
// component except its smallest goes to Q_M, except its largest to Q_m.
struct ComponentSets {
    std::vector<char> in_max, in_min;
};

ComponentSets component_sets(const SignedPermutation& p) {
    ComponentSets q{std::vector<char>(p.size() + 2, 0), std::vector<char>(p.size() + 2, 0)};
    for (const auto& c : find_components(p).components) {
        if (c.kind != ComponentKind::bad) continue;
        for (Element x : c.elements) {
            const auto v = static_cast<std::size_t>(magnitude(x));
            if (magnitude(x) != c.interval.frame_lo) q.in_max[v] = 1;
            if (magnitude(x) != c.interval.frame_hi) q.in_min[v] = 1;
        }
    }
    return q;
}

// The root test evaluated against fixed sets instead of the tree's Q.
bool root_test(const SignedPermutation& p, const ComponentSets& q) {
    std::optional<Element> hi, lo;
    for (const Element x : p.elements()) {
        if (x >= 0) continue;
        const auto v = static_cast<std::size_t>(-x);
        if (q.in_max[v] && (!hi || x > *hi)) hi = x;
        if (q.in_min[v] && (!lo || x < *lo)) lo = x;
    }
    const auto pos = p.positions();
    const auto positive = [&](Element v) { return p[pos[static_cast<std::size_t>(v)]] > 0; };
    return (hi && positive(-*hi - 1)) || (lo && positive(-*lo + 1));
}

struct LogEntry {
    IdentityPair pair;
    Reversal reversal;
    bool undo = false;
};

class Searcher {
public:
    Searcher(RevTree& t, const SolverOptions& options, SolverStats& stats)
        : t_(t), options_(options), stats_(stats), applied_(t.size() + 1, 0), undone_(t.size() + 1, 0) {}

    // Every reversal done to the tree, in order, so the tree always holds
    // the input times the log. Undoing the newest apply pops it instead.
    std::vector<LogEntry> log;

    std::vector<IdentityPair> run() {
        struct Frame {
            std::vector<AppliedPair> front;
            std::vector<IdentityPair> back_reversed;  // back sequence, last pair first
            std::vector<IdentityPair> pending;        // S2 of the recovery awaiting the child
        };
        std::vector<Frame> frames;
        frames.push_back({forward(0), {}, {}});
        if (t_.eligible_pairs() == 0) {
            std::vector<IdentityPair> pairs;
            for (const auto& a : frames.back().front) pairs.push_back(a.pair);
            return pairs;
        }
        std::optional<std::vector<IdentityPair>> child;

        while (true) {
            Frame& f = frames.back();
            const std::size_t depth = frames.size() - 1;
            if (child) {
                const std::vector<IdentityPair>& inserted = *child;
                if (options_.checks && inserted.size() < 2) {
                    throw std::logic_error("recursive call returned " + std::to_string(inserted.size()) + " pairs");
                }
                const std::size_t drop = inserted.size() % 2 == 1 && !f.pending.empty() ? 1 : 0;
                for (std::size_t k = f.pending.size(); k-- > drop;) f.back_reversed.push_back(f.pending[k]);
                for (auto it = inserted.rbegin(); it != inserted.rend(); ++it) f.back_reversed.push_back(*it);
                emit("insert depth=" + std::to_string(depth) + " count=" + std::to_string(inserted.size()) +
                     " dropped=" + std::to_string(drop));
                f.pending.clear();
                child.reset();
            }

            std::vector<IdentityPair> done;
            bool finished = false;
            if (f.front.empty()) {
                finished = true;
            } else {
                std::vector<AppliedPair> s2 = recover_logged(f.front, depth);
                // An emptied front only ends the frame when no good pair is
                // left; otherwise the entry state itself needs a recursive call.
                if (f.front.empty() && t_.all_bad()) {
                    finished = true;
                    for (auto it = s2.rbegin(); it != s2.rend(); ++it) f.back_reversed.push_back(it->pair);
                } else {
                    if (options_.checks) check_stop(s2);
                    for (const auto& a : s2) f.pending.push_back(a.pair);
                    ++stats_.recursions;
                    if (options_.checks && ++recursions_ > t_.size()) {
                        throw std::logic_error("more recursive calls than elements");
                    }
                    emit("recurse depth=" + std::to_string(depth + 1));
                    frames.push_back({forward(depth + 1), {}, {}});
                    stats_.max_depth = std::max(stats_.max_depth, frames.size() - 1);
                    continue;
                }
            }
            if (finished) {
                done.assign(f.back_reversed.rbegin(), f.back_reversed.rend());
                frames.pop_back();
                if (frames.empty()) return done;
                child = std::move(done);
            }
        }
    }

private:
    void emit(const std::string& line) {
        if (options_.trace) options_.trace(line);
    }

    std::vector<AppliedPair> forward(std::size_t depth) {
        std::vector<AppliedPair> s;
        while (const auto pair = t_.find_good()) {
            const Reversal r = t_.apply_pair_reversal(*pair);
            ++stats_.applies;
            if (options_.checks && ++applied_[static_cast<std::size_t>(pair->index())] > 1) {
                throw std::logic_error("pair " + pair_text(*pair) + " applied twice");
            }
            s.push_back({*pair, r});
            log.push_back({*pair, r, false});
            if (options_.trace) {
                emit("apply depth=" + std::to_string(depth) + " pair=" + pair_text(*pair) + " rev=" +
                     std::to_string(r.first) + " " + std::to_string(r.last) + snapshot(t_));
            }
        }
        return s;
    }

    std::vector<AppliedPair> recover_logged(std::vector<AppliedPair>& s, std::size_t depth) {
        std::vector<AppliedPair> tail;
        if (t_.eligible_pairs() == 0 && !options_.checks && !options_.trace) {
            // Nothing is left to sort, so unwinding cannot stop early and no
            // later step reads the tree's order.
            tail.swap(s);
            return tail;
        }
        const EligibleSets q = options_.checks ? t_.eligible() : EligibleSets{};
        if (options_.checks) stuck_sets_ = component_sets(t_.to_permutation());
        while (!s.empty() && t_.all_bad()) {
            if (options_.checks && has_good_eligible_pair(t_.to_permutation(), q)) {
                throw std::logic_error("tree fingerprint missed an eligible good pair");
            }
            ++stats_.undone_states;
            if (extremes_find_good()) ++stats_.undone_states_passed_by_extremes;
            if (options_.checks && root_test(t_.to_permutation(), stuck_sets_))
                ++stats_.undone_states_passed_by_component_sets;
            const AppliedPair last = s.back();
            s.pop_back();
            t_.undo_reversal(last.reversal);
            if (!log.empty() && !log.back().undo && log.back().pair == last.pair) {
                log.pop_back();
            } else {
                log.push_back({last.pair, last.reversal, true});
            }
            ++stats_.undos;
            if (options_.checks && ++undone_[static_cast<std::size_t>(last.pair.index())] > 1) {
                throw std::logic_error("pair " + pair_text(last.pair) + " undone twice");
            }
            tail.push_back(last);
            if (options_.trace) {
                emit("undo depth=" + std::to_string(depth) + " pair=" + pair_text(last.pair) + " rev=" +
                     std::to_string(last.reversal.first) + " " + std::to_string(last.reversal.last) + snapshot(t_));
            }
        }
        if (!s.empty()) note_stop();
        std::reverse(tail.begin(), tail.end());
        return tail;
    }

    void note_stop() {
        ++stats_.recovery_stops;
        if (!t_.has_negative()) ++stats_.stops_without_negative;
        if (!extremes_find_good()) ++stats_.stops_missed_by_extremes;
        if (options_.checks && !root_test(t_.to_permutation(), stuck_sets_)) ++stats_.stops_missed_by_component_sets;
    }

    // The root test: M- = -q with q-1 positive, or m- = -q with q+1 positive.
    bool extremes_find_good() {
        if (const auto m = t_.max_negative(); m && t_.sign_of(-*m - 1) > 0) return true;
        if (const auto m = t_.min_negative(); m && t_.sign_of(-*m + 1) > 0) return true;
        return false;
    }

    // At a recovery stop the last undone reversal created a bad component
    // and some eligible pair is good again.
    void check_stop(const std::vector<AppliedPair>& s2) {
        if (s2.empty()) return;
        const SignedPermutation before = t_.to_permutation();
        const SignedPermutation after = apply_reversal(before, s2.front().reversal);
        const auto old_bad = bad_sets(before);
        bool created = false;
        for (const auto& s : bad_sets(after))
            if (!old_bad.count(s)) created = true;
        if (!created) throw std::logic_error("recovery stopped before a reversal that is not unsafe");
        if (!has_good_eligible_pair(before, t_.eligible())) throw std::logic_error("no eligible good pair at recovery stop");
    }

    RevTree& t_;
    const SolverOptions& options_;
    SolverStats& stats_;
    std::vector<unsigned> applied_;
    std::vector<unsigned> undone_;
    std::size_t recursions_ = 0;
    ComponentSets stuck_sets_;
};

}  // namespace

std::vector<AppliedPair> do_good(RevTree& t) {
    std::vector<AppliedPair> s;
    while (const auto pair = t.find_good()) s.push_back({*pair, t.apply_pair_reversal(*pair)});
    return s;
}

std::vector<AppliedPair> recover(RevTree& t, std::vector<AppliedPair>& s) {
    std::vector<AppliedPair> tail;
    while (!s.empty() && t.all_bad()) {
        t.undo_reversal(s.back().reversal);
        tail.push_back(s.back());
        s.pop_back();
    }
    std::reverse(tail.begin(), tail.end());
    return tail;
}

namespace {

std::vector<IdentityPair> search(RevTree& t, const SolverOptions& options, SolverStats* stats,
                                 std::vector<LogEntry>* log) {
    SolverStats local;
    SolverStats& out = stats ? *stats : local;
    const std::uint64_t scans = t.fallback_scans();
    Searcher searcher(t, options, out);
    std::vector<IdentityPair> pairs = searcher.run();
    out.fallback_scans += t.fallback_scans() - scans;
    if (log) *log = std::move(searcher.log);
    return pairs;
}

Reversal replay_step(RevTree& t, const IdentityPair& pair, std::size_t step) {
    const Element lo = magnitude(pair.lo);
    const Element hi = magnitude(pair.hi);
    if (static_cast<std::size_t>(hi) > t.size() + 1) {
        throw ReplayError("pair " + std::to_string(step) + " outside permutation");
    }
    const Element a = lo * t.sign_of(lo);
    const Element b = hi * t.sign_of(hi);
    if ((a < 0) == (b < 0)) {
        throw ReplayError("pair " + std::to_string(step) + " (" + std::to_string(a) + ", " + std::to_string(b) +
                          ") is not good when reached");
    }
    return t.apply_pair_only(a, b);
}

}  // namespace

std::vector<IdentityPair> sort_good_tree(RevTree& t, const SolverOptions& options, SolverStats* stats) {
    return search(t, options, stats, nullptr);
}

ReplayResult replay_pairs_fast(const SignedPermutation& p, const std::vector<IdentityPair>& pairs) {
    RevTree t(p);
    ReplayResult out{{}, {}};
    out.reversals.reserve(pairs.size());
    for (std::size_t step = 0; step < pairs.size(); ++step) out.reversals.push_back(replay_step(t, pairs[step], step));
    out.result = t.to_permutation();
    return out;
}

SortingScenario sort_signed_permutation(const SignedPermutation& p, const SolverOptions& options, SolverStats* stats) {
    SortingScenario out;
    ClearingResult cleared = clear_bad_components(p);
    out.prefix = std::move(cleared.reversals);
    RevTree t(cleared.result);
    std::vector<LogEntry> log;
    out.pairs = search(t, options, stats, &log);

    // The answer starts with the pairs the tree applied first and kept; their
    // reversals stand. Roll the tree back to there and replay the rest.
    std::size_t kept = 0;
    while (kept < log.size() && kept < out.pairs.size() && !log[kept].undo && log[kept].pair == out.pairs[kept]) ++kept;
    for (std::size_t k = log.size(); k-- > kept;) t.undo_reversal(log[k].reversal);
    out.reversals.reserve(out.pairs.size());
    for (std::size_t k = 0; k < kept; ++k) out.reversals.push_back(log[k].reversal);
    for (std::size_t k = kept; k < out.pairs.size(); ++k) out.reversals.push_back(replay_step(t, out.pairs[k], k));
    out.final_permutation = t.to_permutation();
    if (!is_identity(out.final_permutation)) {
        throw std::logic_error("solver output leaves " + format_extended(out.final_permutation));
    }
    return out;
}

}  // namespace signrev
