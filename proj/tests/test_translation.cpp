#include "support/models.hpp"
#include "support/oracles.hpp"
#include "tpdareach/errors.hpp"
#include "tpdareach/translation.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace tpdareach;
using namespace tpdareach::translation;
using regions::Item;
using regions::Val;

namespace {

const Item R = Item::ref();
const Item X = Item::clock(0);
const Item Y = Item::clock(1);
const Item A = Item::sym(0);

Val v(std::uint32_t n) { return Val::of(n); }
Region reg(std::vector<regions::ItemSet> sets, std::uint32_t cmax) { return Region(std::move(sets), cmax); }

tpda::Tpda clocks_only(std::vector<std::string> clocks) {
    tpda::Tpda t;
    t.states = {"s"};
    t.init = "s";
    t.clocks = std::move(clocks);
    return t;
}

std::set<std::string> oracle_names(const tpda::Tpda &model, std::size_t steps, std::uint32_t den) {
    const tpda::IndexedTpda t(model);
    std::set<std::string> out;
    for (auto s : tpda::grid_oracle(t, steps, den))
        out.insert(t.state_name(s));
    return out;
}

} // namespace

TEST_CASE("initial region") {
    CHECK(initial_region(tpda::IndexedTpda(clocks_only({"x", "y"}))) ==
          reg({{{R, v(0)}, {X, v(0)}, {Y, v(0)}}}, 0));
    CHECK(initial_region(tpda::IndexedTpda(clocks_only({}))) == reg({{{R, v(0)}}}, 0));
    CHECK(initial_region(tpda::IndexedTpda(clocks_only({"x"}))) == reg({{{R, v(0)}, {X, v(0)}}}, 0));
}

TEST_CASE("timed rule pins the reference") {
    const auto top = reg({{{R, v(0)}, {X, v(0)}, {Y, v(0)}}}, 7);
    CHECK(regions::rotate(top, false) == reg({{{R, v(0)}}, {{X, v(0)}, {Y, v(0)}}}, 7));
    const auto fix = reg({{{R, v(0)}}}, 7);
    CHECK(regions::rotate(fix, false) == fix);
}

TEST_CASE("push successors") {
    const auto bottom = reg({{{R, v(0)}, {X, v(0)}}}, 1);
    const auto pushed = push_successors(bottom, 0, Interval::point(1));
    CHECK(pushed == std::set<Region>{reg({{{R, v(0)}, {X, v(0)}, {R.shadow(), v(0)}, {X.shadow(), v(0)}, {A, v(1)}}}, 1)});
    for (const auto &p : pushed)
        CHECK(p.shape() == regions::Shape::Stack);

    // On a stack region the old symbol becomes a shadow.
    const auto stacked = *pushed.begin();
    for (const auto &p : push_successors(stacked, 1, Interval::closed(0, 1))) {
        CHECK(p.contains(A.shadow()));
        CHECK(p.contains(Item::sym(1)));
        CHECK_FALSE(p.contains(A));
    }

    const auto later = reg({{{R, v(0)}}, {{X, v(1)}}}, 3);
    const auto multi = push_successors(later, 0, Interval{1, true, 3, false});
    CHECK(multi.size() > 1);
    for (const auto &p : multi)
        CHECK(regions::satisfies(p, A, Interval{1, true, 3, false}));
}

TEST_CASE("refresh") {
    const auto lower = reg({{{R, v(0)}, {X, v(0)}}}, 2);
    const auto fresh = reg({{{R, v(0)}, {X, v(0)}, {R.shadow(), v(0)}, {X.shadow(), v(0)}, {A, v(1)}}}, 2);
    const auto k0 = refresh(lower, fresh);
    REQUIRE_FALSE(k0.empty());
    CHECK(k0.front().first == 0);
    CHECK(k0.front().second == lower);

    const auto aged = reg({{{R, v(0)}, {X, v(1)}, {R.shadow(), v(1)}, {X.shadow(), v(1)}, {A, v(2)}}}, 2);
    const auto k2 = refresh(lower, aged);
    REQUIRE(k2.size() == 1);
    CHECK(k2.front().first == 2);
    CHECK(k2.front().second == reg({{{R, v(1)}, {X, v(1)}}}, 2));
}

TEST_CASE("merge") {
    const auto lower = reg({{{R, v(1)}, {X, v(1)}}}, 2);
    const auto upper = reg({{{R, v(0)}, {X, v(1)}, {R.shadow(), v(1)}, {X.shadow(), v(1)}, {A, v(2)}}}, 2);
    CHECK(merge(lower, upper) == std::set<Region>{reg({{{R, v(0)}, {X, v(1)}}}, 2)});
    CHECK(pop_successors(reg({{{R, v(0)}, {X, v(0)}}}, 2), upper) == std::set<Region>{reg({{{R, v(0)}, {X, v(1)}}}, 2)});
    CHECK_THROWS_AS(merge(reg({{{R, v(0)}, {X, v(0)}}}, 2), upper), DomainError);

    const auto untouched = reg({{{R, v(0)}, {X, v(0)}, {R.shadow(), v(0)}, {X.shadow(), v(0)}, {A, v(0)}}}, 2);
    CHECK(merge(reg({{{R, v(0)}, {X, v(0)}}}, 2), untouched) == std::set<Region>{reg({{{R, v(0)}, {X, v(0)}}}, 2)});
}

TEST_CASE("one-push model ends with the hand-derived region") {
    const Analysis an(testing::one_push_tpda());
    const auto verdict = an.verdict("s3");
    REQUIRE(std::holds_alternative<pda::Reachable>(verdict));
    const auto &w = std::get<pda::Reachable>(verdict).witness;
    const auto &sym = an.symbolic();
    CHECK(witness_reaches(sym, w, 3));
    const auto end = pda::witness_replay(sym.pda(), w);
    REQUIRE(std::holds_alternative<pda::PdaConfig>(end));
    const auto &stack = std::get<pda::PdaConfig>(end).stack;
    REQUIRE(stack.size() == 1);
    CHECK(sym.region(stack.front()) == reg({{{R, v(0)}, {X, v(1)}}}, 2));
}

TEST_CASE("blocked models") {
    CHECK(std::holds_alternative<pda::Reachable>(check_reachability(testing::blocked_tpda(), "s4")));
    const Analysis an(testing::blocked_variant_tpda());
    CHECK(std::holds_alternative<pda::Reachable>(an.verdict("s3")));
    CHECK(std::holds_alternative<pda::Unreachable>(an.verdict("s4")));
    CHECK_THROWS_AS(an.verdict("nope"), ModelError);
}

TEST_CASE("untimed embedding matches the PDA engine") {
    std::mt19937 rng(21);
    for (int round = 0; round < 30; ++round) {
        const auto p = testing::random_pda(rng, 4, 2, 7);
        const auto t = testing::untimed_embedding(p, rng, round % 2 == 1);
        std::set<std::string> expected;
        for (auto s : pda::reachable_states(dsl::compile(p)))
            expected.insert(p.states[s.value]);
        CHECK(Analysis(t).reachable_state_names() == expected);
    }
}

TEST_CASE("stack-free embedding matches region-graph exploration") {
    std::mt19937 rng(8);
    testing::TpdaShape shape;
    shape.stack = false;
    for (int round = 0; round < 30; ++round) {
        const auto t = testing::random_tpda(rng, shape);
        CHECK(Analysis(t).reachable_state_names() == testing::region_graph_reachable(t));
    }
}

TEST_CASE("oracle states are symbolically reachable and witnesses replay") {
    std::mt19937 rng(42);
    for (int round = 0; round < 25; ++round) {
        const auto t = testing::random_tpda(rng, {});
        const Analysis an(t);
        const auto symbolic = an.reachable_state_names();
        const auto oracle = oracle_names(t, 6, 2);
        CHECK(std::includes(symbolic.begin(), symbolic.end(), oracle.begin(), oracle.end()));
        for (const auto &name : symbolic) {
            const auto verdict = an.verdict(name);
            REQUIRE(std::holds_alternative<pda::Reachable>(verdict));
            const auto target = *an.symbolic().tpda().state_index(name);
            CHECK(witness_reaches(an.symbolic(), std::get<pda::Reachable>(verdict).witness, target));
        }
    }
}

TEST_CASE("stack regions keep the reference and mirror the region below") {
    std::mt19937 rng(1);
    for (int round = 0; round < 15; ++round) {
        const auto t = testing::random_tpda(rng, {});
        const Analysis an(t);
        const auto &sym = an.symbolic();
        for (const auto &name : an.reachable_state_names()) {
            const auto w = std::get<pda::Reachable>(an.verdict(name)).witness;
            pda::PdaConfig c{sym.pda().init(), {}};
            for (const auto &step : w.steps) {
                if (step.op.kind == pda::StackOp::Kind::Push)
                    c.stack.insert(c.stack.begin(), step.op.symbol);
                if (step.op.kind == pda::StackOp::Kind::Pop) {
                    REQUIRE(!c.stack.empty());
                    REQUIRE(c.stack.front() == step.op.symbol);
                    c.stack.erase(c.stack.begin());
                }
                c.state = step.dst;
                for (std::size_t i = 0; i < c.stack.size(); ++i) {
                    const auto &r = sym.region(c.stack[i]);
                    CHECK(r.find(R) == regions::Position{0, Val::of(0)});
                    const bool bottom = i + 1 == c.stack.size();
                    CHECK(r.shape() == (bottom ? regions::Shape::Bottom : regions::Shape::Stack));
                }
            }
        }
    }
}

TEST_CASE("rendering") {
    const SymbolicPda sym(testing::one_push_tpda());
    CHECK(sym.state_name(sym.plain_state(0)) == "s0");
    const auto s0 = sym.symbol_of(reg({{{R, v(0)}, {X, v(0)}}}, 2));
    CHECK(sym.render_region(s0) == "{R:0, x:0}");
}
