#include "doctest.h"
#include "test_support.hpp"

#include "safedemo/error.hpp"
#include "safedemo/profile.hpp"

#include <cmath>

using namespace safedemo;
using testing_support::ch;
using testing_support::gate;

namespace {

constexpr double fire_frequency = 1.0 / 1.75;
// Mean step duration: 0.5 s at IDLE, 2 s at FIRE.
constexpr double mean_step_seconds = (1.0 - fire_frequency) * 0.5 + fire_frequency * 2.0;

walk gate_orbit(std::size_t length, std::uint64_t seed = 11)
{
    return simulate_orbit(*gate().model, gate().start_step(), gate().pattern.with_seed(seed), length);
}

} // namespace

TEST_CASE("random stream is deterministic and uniform")
{
    random_stream a{42};
    random_stream b{42};
    for (int i = 0; i < 100; ++i)
        CHECK(a.next_u64() == b.next_u64());
    random_stream r{1};
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = r.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(sum / 10000.0 == doctest::Approx(0.5).epsilon(0.02));
    CHECK(derive_seed(7, 0) != derive_seed(7, 1));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("draw_index follows the weights")
{
    random_stream r{3};
    std::vector<int> hits(3);
    for (int i = 0; i < 20000; ++i)
        ++hits[draw_index(r, {0.2, 0.0, 0.8})];
    CHECK(hits[1] == 0);
    CHECK(hits[0] / 20000.0 == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("usage pattern validation")
{
    const auto& a = *gate().model;
    CHECK_NOTHROW(gate().pattern.validate(a));
    CHECK_NOTHROW(usage_pattern::uniform(a, 1).validate(a));

    auto p = gate().pattern;
    p.independent["sensor"].weights = {0.5, 0.6};
    CHECK_THROWS_AS(p.validate(a), domain_error);

    p = gate().pattern;
    p.independent["sensor"].outcomes = {0, 7};
    CHECK_THROWS_AS(p.validate(a), domain_error);

    p = gate().pattern;
    p.independent.clear();
    CHECK_THROWS_AS(p.validate(a), domain_error);
}

TEST_CASE("trace patterns replay their trace")
{
    auto p = gate().pattern;
    p.mode = usage_pattern::kind::trace;
    p.trace = {ch({{"sensor", 1}}), ch({{"sensor", 0}})};
    const auto w = simulate_orbit(*gate().model, gate().start_step(), p, 3);
    CHECK(w.excitations == p.trace);
    CHECK(path_projection(w) == std::vector<std::string>{"IDLE", "FIRE", "FIRE"});
    CHECK_THROWS_AS(simulate_orbit(*gate().model, gate().start_step(), p, 4), truncation_error);
}

TEST_CASE("orbits are deterministic in the seed")
{
    CHECK(gate_orbit(500, 3) == gate_orbit(500, 3));
    CHECK_FALSE(gate_orbit(500, 3) == gate_orbit(500, 4));
}

TEST_CASE("count_arrivals and sync")
{
    const auto& a = *gate().model;
    auto p = gate().pattern;
    p.mode = usage_pattern::kind::trace;
    p.trace = {ch({{"sensor", 0}}), ch({{"sensor", 0}})};
    const auto w = simulate_orbit(a, gate().start_step(), p, 3);
    const auto fire = step_predicate::at_loci({"FIRE"});
    CHECK(count_arrivals(w, fire, 0) == 0);
    CHECK(count_arrivals(w, fire, 1) == 0);
    CHECK(count_arrivals(w, fire, 2) == 1);
    CHECK(count_arrivals(w, fire, 3) == 1);
    CHECK(count_arrivals(w, step_predicate::all(), 3) == 3);
    CHECK(count_arrivals(w, step_predicate::nothing(), 3) == 0);
    CHECK(sync(a, w, 0) == 0.0);
    CHECK(sync(a, w, 3) == doctest::Approx(3.0));
    CHECK(sync(a, w, 2) == doctest::Approx(2.5));
}

TEST_CASE("step predicates combine their components")
{
    const auto& a = *gate().model;
    const auto armed = make_consistent_step(a, "FIRE", ch({{"mode", 1}, {"sensor", 0}}));
    const auto idle = make_consistent_step(a, "IDLE", ch({{"mode", 1}, {"sensor", 0}}));
    CHECK(step_predicate::all().matches(armed));
    CHECK_FALSE(step_predicate::nothing().matches(armed));
    CHECK(step_predicate::at_loci({"FIRE"}).matches(armed));
    CHECK_FALSE(step_predicate::at_loci({"FIRE"}).matches(idle));
    CHECK(step_predicate::all().with_functionalities({"arm"}).matches(idle));
    CHECK(step_predicate::all().with_guard(expression::parse("mode = 1 and out.mode = 0")).matches(armed));
    CHECK_FALSE(step_predicate::all().with_guard(expression::parse("out.mode = 1")).matches(armed));
    CHECK(step_predicate::members({armed}, "one").matches(armed));
    CHECK_FALSE(step_predicate::members({armed}, "one").matches(idle));
}

TEST_CASE("absolute FIRE frequency matches the chain within 3 sigma")
{
    const std::size_t n = 40000;
    const auto w = gate_orbit(n);
    const double p = absolute_profile(w, step_predicate::at_loci({"FIRE"}));
    const double sigma = std::sqrt(fire_frequency * (1.0 - fire_frequency) / static_cast<double>(n));
    CHECK(std::abs(p - fire_frequency) < 3.0 * sigma);
}

TEST_CASE("relative profile at FIRE")
{
    const auto& a = *gate().model;
    const auto w = gate_orbit(40000);
    const auto r = estimate_relative_profile(w, step_predicate::at_loci({"FIRE"}), 11);
    CHECK(r.support.size() == 4);
    CHECK(r.total() == doctest::Approx(1.0));
    CHECK(r.walk_length == 40000);
    std::size_t matches = 0;
    for (const auto& e : r.support)
        matches += e.count;
    CHECK(matches == r.total_matches);

    auto prob = [&](int mode, int sensor) {
        return r.probability(make_consistent_step(a, "FIRE", ch({{"mode", mode}, {"sensor", sensor}})));
    };
    const double n = static_cast<double>(r.total_matches);
    auto near = [&](double got, double want) { return std::abs(got - want) < 3.0 * std::sqrt(want * (1 - want) / n); };
    CHECK(near(prob(1, 0), 0.5625));
    CHECK(near(prob(1, 1), 0.1875));
    CHECK(near(prob(0, 0), 0.1875));
    CHECK(near(prob(0, 1), 0.0625));
    CHECK(r.probability(make_consistent_step(a, "IDLE", ch({{"mode", 0}, {"sensor", 0}}))) == 0.0);

    CHECK_THROWS_AS(estimate_relative_profile(w, step_predicate::nothing()), insufficient_data_error);
}

TEST_CASE("counting norm of the IDLE edge")
{
    const auto& a = *gate().model;
    const auto w = gate_orbit(40000);
    const auto est = counting_norm(a, w, step_predicate::at_loci({"IDLE"}), 4000);
    const double expected = (1.0 - fire_frequency) / mean_step_seconds;
    CHECK(expected == doctest::Approx(0.3158).epsilon(1e-3));
    CHECK(est.value == doctest::Approx(expected).epsilon(0.02));
    CHECK(est.window_delta < 0.02);
    CHECK(est.steps_used == 40000);
}

TEST_CASE("counting norm is additive over disjoint references and 1 for all under unit durations")
{
    const auto& a = *gate().model;
    const auto w = gate_orbit(5000);
    const auto idle = counting_norm(a, w, step_predicate::at_loci({"IDLE"}), 500).value;
    const auto fire = counting_norm(a, w, step_predicate::at_loci({"FIRE"}), 500).value;
    const auto both = counting_norm(a, w, step_predicate::at_loci({"IDLE", "FIRE"}), 500).value;
    CHECK(both == doctest::Approx(idle + fire));
    CHECK(both <= idle + fire + 1e-12);

    basis b{ensemble{{{"p", {0, 1}}, {"v", {0, 1}}}}, ensemble{{{"p", {0, 1}}}}};
    automaton::catalogs c;
    c.functionalities.emplace_back("flip", std::map<std::string, assignment>{{"p", assignment{{}, expression::parse("1 - p")}}}, 1.0);
    c.actuators.emplace_back("only", std::vector<guarded_name>{}, "flip");
    c.loci = {"A"};
    c.locator = {{"A", "only"}};
    c.jumps.emplace_back("A", std::vector<guarded_name>{}, "A");
    const automaton unit{std::move(b), std::move(c)};
    const auto uw = simulate_orbit(unit, make_consistent_step(unit, "A", ch({{"p", 0}, {"v", 0}})),
                                   usage_pattern::uniform(unit, 2), 1000);
    CHECK(counting_norm(unit, uw, step_predicate::all(), 100).value == doctest::Approx(1.0));
}

TEST_CASE("limit conjectures hold across seeds and fail across differing patterns")
{
    const auto& a = *gate().model;
    const auto fire = step_predicate::at_loci({"FIRE"});
    const auto armed = fire.with_guard(expression::parse("mode = 1"));
    const auto same = check_limit_conjectures(a, gate().start_step(), gate().pattern, fire, armed, 8, 20000, 0.05);
    CHECK(same.runs == 8);
    CHECK(same.count_ratios.size() == 8);
    CHECK(same.pass);

    auto busy = gate().pattern;
    busy.independent["sensor"].weights = {0.1, 0.9};
    const auto mixed = check_limit_conjectures(a, gate().start_step(), std::vector<usage_pattern>{gate().pattern, busy},
                                               fire, armed, 20000, 0.05);
    CHECK_FALSE(mixed.pass);
    CHECK(mixed.time_ratio_deviation > 0.05);
}

TEST_CASE("max pairwise relative deviation")
{
    CHECK(max_pairwise_relative_deviation({}) == 0.0);
    CHECK(max_pairwise_relative_deviation({2.0}) == 0.0);
    CHECK(max_pairwise_relative_deviation({1.0, 2.0, 1.5}) == doctest::Approx(0.5));
}
