#include "doctest.h"
#include "random_automaton.hpp"
#include "test_support.hpp"

#include "safedemo/error.hpp"
#include "safedemo/profile.hpp"

using namespace safedemo;
using testing_support::ch;
using testing_support::gate;

namespace {

assignment constant(const char* text)
{
    return assignment{{}, expression::parse(text)};
}

// One functionality sending everything to φ₀ = {p = 2}.
automaton constant_automaton()
{
    basis b{ensemble{{{"p", {0, 1, 2}}, {"v", {0, 1}}}}, ensemble{{{"p", {0, 1, 2}}}}};
    automaton::catalogs c;
    c.functionalities.emplace_back("hold", std::map<std::string, assignment>{{"p", constant("2")}}, 1.0);
    c.actuators.emplace_back("only", std::vector<guarded_name>{}, "hold");
    c.loci = {"A", "B"};
    c.locator = {{"A", "only"}, {"B", "only"}};
    c.jumps.emplace_back("A", std::vector<guarded_name>{{expression::parse("v = 1"), "B"}}, "A");
    c.jumps.emplace_back("B", std::vector<guarded_name>{}, "A");
    return automaton{std::move(b), std::move(c)};
}

} // namespace

TEST_CASE("make_consistent_step on the gate model")
{
    const auto& a = *gate().model;
    const auto s = make_consistent_step(a, "IDLE", ch({{"mode", 0}, {"sensor", 0}}));
    CHECK(s.functionality == "arm");
    CHECK(s.fr.ordinate == ch({{"mode", 1}}));
    CHECK(a.is_consistent(s));
    CHECK(a.is_canonical(s));
    CHECK_THROWS_AS(make_consistent_step(a, "NOWHERE", ch({{"mode", 0}, {"sensor", 0}})), domain_error);
    CHECK_THROWS_AS(make_consistent_step(a, "IDLE", ch({{"mode", 3}, {"sensor", 0}})), domain_error);
}

TEST_CASE("constant automaton maps every stimulus to its single ordinate")
{
    const auto a = constant_automaton();
    for (const auto& locus : a.loci())
        for (const auto& psi : enumerate_choice_space(a.stimulus_basis().stimulus()))
            CHECK(make_consistent_step(a, locus, psi).fr.ordinate == ch({{"p", 2}}));
}

TEST_CASE("transit follows the jump, the dyadic stimulus and the new locus' actuator")
{
    const auto& a = *gate().model;
    const auto idle = make_consistent_step(a, "IDLE", ch({{"mode", 0}, {"sensor", 1}}));
    const auto next = transit(a, idle, ch({{"sensor", 1}}));
    CHECK(next.locus == "FIRE");
    CHECK(next.functionality == "fire");
    CHECK(next.fr.abscissa == ch({{"mode", 1}, {"sensor", 1}}));
    CHECK(next.fr.ordinate == ch({{"mode", 0}}));

    CHECK_THROWS_AS(transit(a, idle, ch({{"sensor", 5}})), domain_error);
    CHECK_THROWS_AS(transit(a, idle, ch({{"mode", 1}})), domain_error);
    CHECK_THROWS_AS(transit(a, idle, choice{}), domain_error);
}

TEST_CASE("exhaustive conjointness on the 16-case gate space")
{
    const auto& a = *gate().model;
    int cases = 0;
    for (const auto& locus : a.loci())
        for (const auto& psi : enumerate_choice_space(a.stimulus_basis().stimulus()))
            for (const auto& xi : testing_support::excitation_space(a)) {
                const auto s = make_consistent_step(a, locus, psi);
                const auto t = transit(a, s, xi);
                CHECK(restrict_choice(t.fr.abscissa, a.persistent_indices()) == a.apply(s.functionality, psi));
                CHECK(conjoint(a, s.fr, t.fr));
                CHECK(a.is_consistent(t));
                ++cases;
            }
    CHECK(cases == 16);
}

TEST_CASE("an inconsistent step still has a consistent successor")
{
    const auto& a = *gate().model;
    step odd{"IDLE", "fire", frame{ch({{"mode", 0}, {"sensor", 0}}), ch({{"mode", 1}})}};
    CHECK_FALSE(a.is_consistent(odd));
    const auto t = transit(a, odd, ch({{"sensor", 0}}));
    CHECK(a.is_consistent(t));
    CHECK(t.fr.abscissa == ch({{"mode", 0}, {"sensor", 0}}));
}

TEST_CASE("walks and their projections")
{
    const auto& a = *gate().model;
    const auto start = make_consistent_step(a, "IDLE", ch({{"mode", 0}, {"sensor", 0}}));

    trace_source none{{}};
    const auto single = run_walk(a, start, none, 1);
    CHECK(single.steps.size() == 1);
    CHECK(path_projection(single).size() == 1);
    CHECK(process_projection(single).size() == 1);
    CHECK(procedure_projection(single).size() == 1);

    trace_source trace{{ch({{"sensor", 0}}), ch({{"sensor", 0}})}};
    const auto w = run_walk(a, start, trace, 3);
    CHECK(path_projection(w) == std::vector<std::string>{"IDLE", "FIRE", "IDLE"});
    CHECK(procedure_projection(w) == std::vector<std::string>{"arm", "fire", "arm"});
    CHECK(w.excitations.size() == 2);
    const auto process = process_projection(w);
    CHECK(successively_conjoint(a, process));
    const auto procedure = procedure_projection(w);
    CHECK(procedure_covers(a, procedure, process));
    for (std::size_t i = 0; i < w.steps.size(); ++i)
        CHECK(step{path_projection(w)[i], procedure[i], process[i]} == w.steps[i]);

    trace_source short_trace{{ch({{"sensor", 1}})}};
    try {
        (void)run_walk(a, start, short_trace, 4);
        FAIL("expected a truncation error");
    } catch (const truncation_error& e) {
        CHECK(e.index() == 1);
    }
}

TEST_CASE("process conjointness fails on a broken frame sequence")
{
    const auto& a = *gate().model;
    const std::vector<frame> broken{{ch({{"mode", 0}, {"sensor", 0}}), ch({{"mode", 1}})},
                                    {ch({{"mode", 0}, {"sensor", 0}}), ch({{"mode", 1}})}};
    CHECK_FALSE(successively_conjoint(a, broken));
    const std::vector<std::string> procedure{"fire", "fire"};
    CHECK_FALSE(procedure_covers(a, procedure, broken));
}

TEST_CASE("under-pigeonhole check")
{
    const std::vector<frame> two{{ch({{"x", 0}}), ch({{"p", 1}})}, {ch({{"x", 0}}), ch({{"p", 2}})}};
    const auto r = check_under_pigeonhole(1, two);
    CHECK(r.witnessed);
    CHECK(r.max_homogeneous_count == 2);
    REQUIRE(r.witness.has_value());
    CHECK(*r.witness == ch({{"x", 0}}));
    CHECK_FALSE(check_under_pigeonhole(2, two).witnessed);

    const auto empty = check_under_pigeonhole(1, std::vector<frame>{});
    CHECK_FALSE(empty.witnessed);
    CHECK(empty.max_homogeneous_count == 0);

    const auto& a = *gate().model;
    const auto w = simulate_orbit(a, gate().start_step(), gate().pattern, 500);
    CHECK_FALSE(check_under_pigeonhole(a.functionality_count(), process_projection(w)).witnessed);
}

TEST_CASE("catalog validation names the broken check")
{
    auto base = [] {
        automaton::catalogs c;
        c.functionalities.emplace_back("hold", std::map<std::string, assignment>{{"p", constant("p")}}, 1.0);
        c.actuators.emplace_back("only", std::vector<guarded_name>{}, "hold");
        c.loci = {"A"};
        c.locator = {{"A", "only"}};
        c.jumps.emplace_back("A", std::vector<guarded_name>{}, "A");
        return c;
    };
    const basis b{ensemble{{{"p", {0, 1}}}}, ensemble{{{"p", {0, 1}}}}};
    auto expect = [&](automaton::catalogs c, const std::string& check) {
        try {
            automaton a{b, std::move(c)};
            FAIL("expected validation error ", check);
        } catch (const validation_error& e) {
            CHECK(e.check() == check);
        }
    };
    CHECK_NOTHROW(automaton(b, base()));

    auto c = base();
    c.locator.clear();
    expect(c, "locator not total");

    c = base();
    c.actuators.emplace_back("spare", std::vector<guarded_name>{}, "hold");
    expect(c, "locator not surjective");

    c = base();
    c.functionalities.clear();
    c.functionalities.emplace_back("hold", std::map<std::string, assignment>{{"p", constant("p + 1")}}, 1.0);
    expect(c, "range check failed");

    c = base();
    c.functionalities.clear();
    c.functionalities.emplace_back("hold", std::map<std::string, assignment>{}, 1.0);
    expect(c, "functionality incomplete");

    c = base();
    c.jumps.clear();
    expect(c, "jump not total");

    c = base();
    c.actuators.clear();
    c.actuators.emplace_back("only", std::vector<guarded_name>{}, "missing");
    expect(c, "dangling functionality reference");

    c = base();
    c.jumps.clear();
    c.jumps.emplace_back("A", std::vector<guarded_name>{}, "Z");
    expect(c, "dangling locus reference");

    c = base();
    c.jumps.clear();
    c.jumps.emplace_back("A", std::vector<guarded_name>{{expression::parse("p + 1"), "A"}}, "A");
    expect(c, "guard type check failed");

    c = base();
    c.functionalities.clear();
    c.functionalities.emplace_back("hold", std::map<std::string, assignment>{{"p", constant("q")}}, 1.0);
    expect(c, "unknown variable");

    try {
        functionality f{"slow", {{"p", constant("p")}}, 0.0};
        FAIL("expected validation error");
    } catch (const validation_error& e) {
        CHECK(e.check() == "duration not positive");
    }
}

TEST_CASE("random automata satisfy the iterative-operator theorems")
{
    for (std::uint64_t seed = 200; seed < 230; ++seed) {
        const auto g = testing_support::random_automaton(seed);
        const auto& a = *g.model;
        for (const auto& locus : a.loci())
            for (const auto& psi : enumerate_choice_space(a.stimulus_basis().stimulus()))
                for (const auto& xi : testing_support::excitation_space(a)) {
                    const auto s = make_consistent_step(a, locus, psi);
                    const auto t = transit(a, s, xi);
                    REQUIRE(a.is_canonical(t));
                    REQUIRE(conjoint(a, s.fr, t.fr));
                }
        const auto w = simulate_orbit(a, make_consistent_step(a, a.loci().front(),
                                                              enumerate_choice_space(a.stimulus_basis().stimulus())[0]),
                                      usage_pattern::uniform(a, seed), 40);
        const auto process = process_projection(w);
        const auto procedure = procedure_projection(w);
        CHECK(successively_conjoint(a, process));
        CHECK(procedure_covers(a, procedure, process));
    }
}

TEST_CASE("walks are deterministic under a fixed pattern seed")
{
    const auto& a = *gate().model;
    const auto w1 = simulate_orbit(a, gate().start_step(), gate().pattern.with_seed(5), 300);
    const auto w2 = simulate_orbit(a, gate().start_step(), gate().pattern.with_seed(5), 300);
    const auto w3 = simulate_orbit(a, gate().start_step(), gate().pattern.with_seed(6), 300);
    CHECK(w1 == w2);
    CHECK(w1 != w3);
}
