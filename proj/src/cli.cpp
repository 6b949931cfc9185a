#include "signrev/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "signrev/oracle.hpp"

namespace signrev {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_source(const std::string& source, std::istream& in) {
    if (source == "-") return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::ifstream file(source);
    if (!file) throw UsageError("cannot open " + source);
    return {std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
}

json reversal_list(const std::vector<Reversal>& rs) {
    json out = json::array();
    for (const Reversal& r : rs) out.push_back({r.first, r.last});
    return out;
}

std::optional<DistanceTable> table_for(std::size_t n) {
    if (n > max_table_size) return std::nullopt;
    if (const char* dir = std::getenv("SIGNREV_CACHE_DIR")) return cached_distance_table(n, dir);
    return bfs_distance_table(n);
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream s(text);
    for (std::string line; std::getline(s, line);) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
    }
    return out;
}

Reversal parse_reversal_line(const std::string& line) {
    std::istringstream s(line);
    long long i = 0, j = 0;
    std::string extra;
    if (!(s >> i >> j) || (s >> extra) || i < 0 || j < 0) throw ParseError("invalid reversal line '" + line + "'");
    return {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
}

json report_json(const VerificationReport& r) {
    json out;
    out["sorts_to_identity"] = r.sorts_to_identity;
    out["all_reversals_good"] = r.all_reversals_good;
    out["length"] = r.length;
    out["optimal"] = r.optimal ? json(*r.optimal) : json(nullptr);
    out["failure"] = r.failure;
    return out;
}

struct Options {
    std::string format = "text";
    std::string input = "-";
    std::string scenario;
    std::uint64_t seed = 1;
    std::size_t n = 8;
    std::size_t count = 1;
    std::vector<std::size_t> sizes{1u << 16, 1u << 17, 1u << 18, 1u << 19, 1u << 20};
    std::size_t reps = 3;
    bool trace = false;
};

int cmd_sort(const Options& o, bool distance_only, std::istream& in, std::ostream& out, std::ostream& err) {
    const SignedPermutation p = parse_permutation(read_source(o.input, in));
    SolverOptions so;
    if (o.trace) so.trace = [&err](const std::string& line) { err << line << '\n'; };
    const SortingScenario s = sort_signed_permutation(p, so);
    if (distance_only) {
        if (o.format == "json") {
            out << json{{"distance", s.length()}}.dump() << '\n';
        } else {
            out << s.length() << '\n';
        }
        return 0;
    }
    if (o.format == "json") {
        out << scenario_json(s) << '\n';
        return 0;
    }
    for (const Reversal& r : s.prefix) out << r.first << ' ' << r.last << '\n';
    for (const Reversal& r : s.reversals) out << r.first << ' ' << r.last << '\n';
    out << format_interior(s.final_permutation) << '\n';
    return 0;
}

int cmd_verify(const Options& o, std::istream& in, std::ostream& out) {
    if (o.input == "-" && o.scenario == "-") throw UsageError("only one of the inputs may be standard input");
    const SignedPermutation p = parse_permutation(read_source(o.input, in));
    const std::string text = read_source(o.scenario, in);
    const auto table = table_for(p.size());
    const DistanceTable* t = table ? &*table : nullptr;

    VerificationReport report;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("scenario is not valid json: ") + e.what());
        }
        std::vector<Reversal> prefix;
        std::vector<IdentityPair> pairs;
        try {
            for (const auto& r : doc.at("prefix")) prefix.push_back({r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>()});
            for (const auto& q : doc.at("pairs")) pairs.emplace_back(q.at(0).get<Element>(), q.at(1).get<Element>());
        } catch (const json::exception& e) {
            throw ParseError(std::string("scenario json: ") + e.what());
        }
        report = verify_scenario(p, prefix, pairs, t);
    } else {
        // Reversal lines, then the permutation they claim to reach.
        const auto lines = lines_of(text);
        std::vector<Reversal> reversals;
        for (std::size_t k = 0; k + 1 < lines.size(); ++k) reversals.push_back(parse_reversal_line(lines[k]));
        const SignedPermutation claimed = parse_permutation(lines.empty() ? std::string() : lines.back());
        report = verify_reversals(p, reversals, t);
        SignedPermutation reached = p;
        bool replayable = true;
        for (const Reversal& r : reversals) {
            try {
                reached.reverse_in_place(r);
            } catch (const std::out_of_range&) {
                replayable = false;
                break;
            }
        }
        if (replayable && !(reached == claimed) && report.failure.empty()) {
            report.sorts_to_identity = report.sorts_to_identity && false;
            report.failure = "final_permutation: reversals reach " + format_interior(reached) + ", not " +
                             format_interior(claimed);
        }
    }
    const bool ok = report.passed() && report.failure.empty();
    if (o.format == "json") {
        out << report_json(report).dump() << '\n';
    } else {
        out << "sorts_to_identity\t" << (report.sorts_to_identity ? "true" : "false") << '\n';
        out << "all_reversals_good\t" << (report.all_reversals_good ? "true" : "false") << '\n';
        out << "length\t" << report.length << '\n';
        out << "optimal\t" << (report.optimal ? (*report.optimal ? "true" : "false") : "unknown") << '\n';
        if (!report.failure.empty()) out << "failure\t" << report.failure << '\n';
    }
    return ok ? 0 : 1;
}

int cmd_gen(const Options& o, std::ostream& out) {
    for (std::size_t k = 0; k < o.count; ++k) out << format_interior(random_permutation(o.n, o.seed + k)) << '\n';
    return 0;
}

int cmd_oracle(const Options& o, std::istream& in, std::ostream& out) {
    const SignedPermutation p = parse_permutation(read_source(o.input, in));
    if (p.size() > max_table_size) {
        throw ResourceGuardError("oracle is limited to n <= " + std::to_string(max_table_size) + ", got n = " +
                                 std::to_string(p.size()));
    }
    const auto table = table_for(p.size());
    out << static_cast<int>(table->distance(p)) << '\n';
    return 0;
}

int cmd_bench(const Options& o, std::ostream& out) {
    out << "# seed=" << o.seed << " generator=" << generator_name << " reps=" << o.reps << '\n';
    out << "n\tmean_seconds\tns_per_n_log2_n\n";
    for (std::size_t n : o.sizes) {
        double total = 0.0;
        for (std::size_t rep = 0; rep < o.reps; ++rep) {
            const SignedPermutation p = random_permutation(n, o.seed + rep);
            const auto start = std::chrono::steady_clock::now();
            const SortingScenario s = sort_signed_permutation(p);
            const auto stop = std::chrono::steady_clock::now();
            if (!is_identity(s.final_permutation)) throw std::logic_error("bench run did not sort");
            total += std::chrono::duration<double>(stop - start).count();
        }
        const double mean = total / static_cast<double>(std::max<std::size_t>(o.reps, 1));
        const double scale = static_cast<double>(n) * std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
        out << n << '\t' << mean << '\t' << mean * 1e9 / scale << '\n';
    }
    return 0;
}

}  // namespace

std::string scenario_json(const SortingScenario& s) {
    json out;
    out["distance"] = s.length();
    std::vector<Reversal> all = s.prefix;
    all.insert(all.end(), s.reversals.begin(), s.reversals.end());
    out["reversals"] = reversal_list(all);
    json pairs = json::array();
    for (const IdentityPair& p : s.pairs) pairs.push_back({p.lo, p.hi});
    out["pairs"] = pairs;
    out["prefix"] = reversal_list(s.prefix);
    return out.dump();
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sorting signed permutations by reversals.\n"
                 "Permutations are whitespace separated signed integers, e.g. \"-2 3 1 4\".\n"
                 "A reversal \"i j\" flips positions i..j of (0 p1 ... pn n+1), counting from 0.",
                 "signrev"};
    app.require_subcommand(1);
    Options o;
    const std::vector<std::string> formats{"text", "json"};

    auto* sort = app.add_subcommand("sort", "print an optimal reversal sequence and the result");
    auto* distance = app.add_subcommand("distance", "print the reversal distance");
    auto* verify = app.add_subcommand("verify", "check a reversal sequence against a permutation");
    auto* gen = app.add_subcommand("gen", "print seeded random permutations");
    auto* oracle = app.add_subcommand("oracle", "exact distance by exhaustive search (n <= 7)");
    auto* bench = app.add_subcommand("bench", "time the solver on random permutations (TSV)");

    for (auto* sub : {sort, distance, oracle}) sub->add_option("input", o.input, "file, or - for standard input");
    for (auto* sub : {sort, distance, verify})
        sub->add_option("--format", o.format, "text or json")->check(CLI::IsMember(formats));
    for (auto* sub : {sort, distance}) sub->add_flag("--trace", o.trace, "log solver events to standard error");
    verify->add_option("permutation", o.input, "file, or - for standard input")->required();
    verify->add_option("scenario", o.scenario, "output of sort (text or json)")->required();
    gen->add_option("-n,--n", o.n, "permutation size");
    gen->add_option("--count", o.count, "number of permutations");
    for (auto* sub : {gen, bench}) sub->add_option("--seed", o.seed, "generator seed");
    bench->add_option("--sizes", o.sizes, "sizes to time")->delimiter(',');
    bench->add_option("--reps", o.reps, "repetitions per size");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sort) return cmd_sort(o, false, in, out, err);
        if (*distance) return cmd_sort(o, true, in, out, err);
        if (*verify) return cmd_verify(o, in, out);
        if (*gen) return cmd_gen(o, out);
        if (*oracle) return cmd_oracle(o, in, out);
        if (*bench) return cmd_bench(o, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ResourceGuardError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cin, std::cout, std::cerr);
}

}  // namespace signrev
