// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "support/models.hpp"
#include "support/oracles.hpp"
#include "tpdareach/core_automata.hpp"
#include "tpdareach/dsl.hpp"
#include "tpdareach/regions.hpp"
#include "tpdareach/tpda.hpp"
#include "tpdareach/translation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace tpdareach;
using regions::Item;
using regions::Region;
using regions::Val;

namespace {

constexpr double kGoldenSeconds = 1.0;
constexpr double kSweepSeconds = 300.0;
constexpr std::size_t kBisimSamples = 1000;
constexpr std::size_t kSweepModels = 100;
constexpr std::size_t kEmbeddings = 25;
constexpr const char *kDiscrepancyReport = "discrepancy_report.txt";

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fixed(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::set<std::string> names_of(const tpda::IndexedTpda &t, const std::set<std::uint32_t> &ids) {
    std::set<std::string> out;
    for (auto s : ids)
        out.insert(t.state_name(s));
    return out;
}

std::string join(const std::set<std::string> &xs) {
    std::string out;
    for (const auto &x : xs)
        out += (out.empty() ? "" : ",") + x;
    return out;
}

Outcome pda_golden() {
    const auto start = std::chrono::steady_clock::now();
    const auto m = testing::prose_pda();
    const auto p = dsl::compile(m);
    const auto s4 = pda::is_state_reachable(p, *dsl::state_id(m, "s4"));
    const auto s6 = pda::is_state_reachable(p, *dsl::state_id(m, "s6"));
    const double secs = seconds_since(start);

    Outcome o;
    std::size_t steps = 0;
    bool replays = false;
    if (const auto *r = std::get_if<pda::Reachable>(&s4)) {
        steps = r->witness.steps.size();
        const auto end = pda::witness_replay(p, r->witness);
        replays = std::holds_alternative<pda::PdaConfig>(end) &&
                  std::get<pda::PdaConfig>(end).state == *dsl::state_id(m, "s4");
    }
    const bool s6_unreachable = std::holds_alternative<pda::Unreachable>(s6);
    o.pass = replays && steps == 3 && s6_unreachable && secs < kGoldenSeconds;
    o.detail = "s4 witness " + std::to_string(steps) + " steps, replays " + (replays ? "yes" : "no") + "; s6 " +
               (s6_unreachable ? "unreachable" : "reachable") + "; " + fixed(secs) + "s";
    return o;
}

Rational random_rational(std::mt19937 &rng, std::uint32_t bound) {
    const std::int64_t den = std::uniform_int_distribution<std::int64_t>(1, 8)(rng);
    const std::int64_t num = std::uniform_int_distribution<std::int64_t>(0, std::int64_t(bound) * den)(rng);
    return Rational(num, den);
}

Outcome bisimulation() {
    std::mt19937 rng(4);
    const std::vector<Item> pool{Item::clock(0), Item::clock(1), Item::clock(2), Item::sym(0),
                                 Item::clock(0).shadow(), Item::ref().shadow()};
    std::size_t failures = 0, membership = 0;
    for (std::size_t i = 0; i < kBisimSamples; ++i) {
        const std::uint32_t cmax = std::uniform_int_distribution<std::uint32_t>(0, 7)(rng);
        regions::ItemValuation v{{Item::ref(), Rational(0)}};
        auto items = pool;
        std::shuffle(items.begin(), items.end(), rng);
        items.resize(std::uniform_int_distribution<std::size_t>(0, 5)(rng));
        for (const auto &it : items)
            v[it] = random_rational(rng, cmax + 2);
        const Rational d = random_rational(rng, cmax + 2);
        auto later = v;
        for (auto &[it, x] : later)
            if (it != Item::ref())
                x += d;
        const auto succ = regions::time_successors(regions::region_of(v, cmax));
        if (std::find(succ.begin(), succ.end(), regions::region_of(later, cmax)) == succ.end())
            ++failures;
        const auto r = regions::region_of(v, cmax);
        for (const auto &[it, x] : v) {
            const auto iv = testing::random_interval(rng, cmax);
            ++membership;
            if (regions::satisfies(r, it, iv) != iv.contains(x))
                ++failures;
        }
    }
    return {failures == 0, std::to_string(kBisimSamples) + " delay samples, " + std::to_string(membership) +
                               " membership checks, " + std::to_string(failures) + " failures"};
}

Outcome rotation() {
    std::size_t failures = 0, checked = 0;
    const Item x6 = Item::clock(6), x7 = Item::clock(7);
    const Region golden({{}, {{x6, Val::of(3)}, {x7, Val::of(0)}}}, 7);
    const Region expected({{{x6, Val::of(4)}, {x7, Val::of(1)}}}, 7);
    const bool golden_ok = regions::rotate(golden, true) == expected;
    if (!golden_ok)
        ++failures;

    for (std::uint32_t cmax = 0; cmax <= 3; ++cmax)
        for (std::size_t n = 1; n <= 4; ++n) {
            std::vector<Item> items{Item::ref()};
            for (std::size_t c = 1; c < n; ++c)
                items.push_back(Item::clock(std::uint16_t(c)));
            for (const auto &r : testing::all_regions(items, cmax)) {
                ++checked;
                const auto rep = testing::representative(r);
                if (regions::rotate(r, true) != testing::next_region(rep, cmax, false))
                    ++failures;
                if (r.find(Item::ref()) != regions::Position{0, Val::of(0)})
                    continue;
                // Follow the pinned chain to its first repetition.
                std::set<Region> seen;
                for (Region cur = r; seen.insert(cur).second;) {
                    const auto next = regions::rotate(cur, false);
                    if (next != testing::next_region(testing::representative(cur), cmax, true) ||
                        next.find(Item::ref()) != regions::Position{0, Val::of(0)})
                        ++failures;
                    cur = next;
                }
            }
        }
    return {failures == 0, std::string("golden ") + (golden_ok ? "ok" : "wrong") + "; " + std::to_string(checked) +
                               " regions enumerated, " + std::to_string(failures) + " failures"};
}

struct SweepModel {
    tpda::Tpda model;
    std::set<std::uint32_t> symbolic;
};

Outcome soundness_sweep(std::vector<SweepModel> &models) {
    std::mt19937 rng(1);
    const auto start = std::chrono::steady_clock::now();
    std::size_t violations = 0;
    for (std::size_t i = 0; i < kSweepModels; ++i) {
        auto t = testing::random_tpda(rng, {});
        const translation::Analysis an(t);
        const tpda::IndexedTpda idx(t);
        const auto concrete = tpda::grid_oracle(idx, 8, 4);
        const auto symbolic = an.reachable_states();
        if (!std::includes(symbolic.begin(), symbolic.end(), concrete.begin(), concrete.end())) {
            ++violations;
            std::cout << "  model " << i << ": oracle " << join(names_of(idx, concrete)) << " vs symbolic "
                      << join(names_of(idx, symbolic)) << "\n";
        }
        models.push_back({std::move(t), symbolic});
    }
    const double secs = seconds_since(start);
    return {violations == 0 && secs < kSweepSeconds, std::to_string(kSweepModels) + " models, " +
                                                         std::to_string(violations) + " violations, " +
                                                         fixed(secs) + "s"};
}

Outcome timing_blocked() {
    const auto verdicts = [](const tpda::Tpda &t) {
        const translation::Analysis an(t);
        const tpda::IndexedTpda idx(t);
        const auto oracle = tpda::grid_oracle(idx, 10, 8);
        const bool s3 = std::holds_alternative<pda::Reachable>(an.verdict("s3"));
        const bool s4 = std::holds_alternative<pda::Reachable>(an.verdict("s4"));
        const bool oracle_s4 = oracle.count(*idx.state_index("s4")) != 0;
        return std::make_tuple(s3, s4, oracle_s4);
    };
    const auto describe = [](const std::tuple<bool, bool, bool> &v) {
        return std::string("s3 ") + (std::get<0>(v) ? "reachable" : "unreachable") + ", s4 " +
               (std::get<1>(v) ? "reachable" : "unreachable") + ", oracle s4 " + (std::get<2>(v) ? "found" : "absent");
    };
    const auto literal = verdicts(testing::blocked_tpda());
    const auto variant = verdicts(testing::blocked_variant_tpda());
    const bool pass = std::get<0>(literal) && !std::get<1>(literal) && !std::get<2>(literal);
    return {pass, "literal model: " + describe(literal) + " (a delay before the push lets the test pass); " +
                      "variant with reset after push: " + describe(variant)};
}

Outcome embeddings() {
    std::size_t mismatches = 0;
    std::mt19937 rng(2);
    for (std::size_t i = 0; i < kEmbeddings; ++i) {
        const auto p = testing::random_pda(rng, 5, 3, 10);
        const auto t = testing::untimed_embedding(p, rng, i % 2 == 1);
        std::set<std::string> expected;
        for (auto s : pda::reachable_states(dsl::compile(p)))
            expected.insert(p.states[s.value]);
        if (translation::Analysis(t).reachable_state_names() != expected)
            ++mismatches;
    }
    std::mt19937 rng2(3);
    testing::TpdaShape shape;
    shape.stack = false;
    for (std::size_t i = 0; i < kEmbeddings; ++i) {
        const auto t = testing::random_tpda(rng2, shape);
        if (translation::Analysis(t).reachable_state_names() != testing::region_graph_reachable(t))
            ++mismatches;
    }
    return {mismatches == 0, std::to_string(kEmbeddings) + " untimed + " + std::to_string(kEmbeddings) +
                                 " stack-free models, " + std::to_string(mismatches) + " mismatches"};
}

Outcome one_push() {
    const translation::Analysis an(testing::one_push_tpda());
    const auto &sym = an.symbolic();
    const auto verdict = an.verdict("s3");
    const auto *r = std::get_if<pda::Reachable>(&verdict);
    if (!r)
        return {false, "s3 unreachable"};
    const auto end = pda::witness_replay(sym.pda(), r->witness);
    if (!std::holds_alternative<pda::PdaConfig>(end))
        return {false, "witness does not replay"};
    const auto &stack = std::get<pda::PdaConfig>(end).stack;
    if (stack.size() != 1)
        return {false, "final stack height " + std::to_string(stack.size())};
    const Region expected({{{Item::ref(), Val::of(0)}, {Item::clock(0), Val::of(1)}}}, sym.tpda().cmax());
    const bool exact = sym.region(stack.front()) == expected;
    return {exact && translation::witness_reaches(sym, r->witness, *sym.tpda().state_index("s3")),
            "final region " + sym.render_region(stack.front())};
}

Outcome discrepancies(const std::vector<SweepModel> &models) {
    std::ofstream report(kDiscrepancyReport);
    std::size_t count = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const tpda::IndexedTpda idx(models[i].model);
        tpda::GridOracleOptions opts;
        opts.max_steps = 12;
        opts.denominator = 8;
        opts.goal = models[i].symbolic;
        const auto confirmed = tpda::grid_oracle(idx, opts);
        for (auto s : models[i].symbolic)
            if (!confirmed.count(s)) {
                ++count;
                report << "model " << i << " state " << idx.state_name(s) << "\n"
                       << dsl::render_model(dsl::Model{models[i].model}) << "\n";
            }
    }
    report << "discrepancies: " << count << "\n";
    return {count == 0, std::to_string(count) + " unconfirmed reachable states over " +
                            std::to_string(models.size()) + " models; report in " + kDiscrepancyReport};
}

} // namespace

int main() {
    std::vector<SweepModel> sweep;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"pda golden", pda_golden},
        {"region bisimulation", bisimulation},
        {"rotation golden and enumeration", rotation},
        {"oracle soundness sweep", [&] { return soundness_sweep(sweep); }},
        {"timing-blocked golden", timing_blocked},
        {"conservative embeddings", embeddings},
        {"one-push round trip", one_push},
        {"oracle discrepancy report", [&] { return discrepancies(sweep); }},
    };
    int failed = 0;
    for (const auto &[name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
