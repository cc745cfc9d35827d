#include "doctest.h"
#include "test_support.hpp"

#include "safedemo/demonstration.hpp"
#include "safedemo/error.hpp"

#include <fstream>
#include <sstream>

using namespace safedemo;
using testing_support::ch;
using testing_support::fixture_path;
using testing_support::gate;

namespace {

std::string gate_text()
{
    std::ifstream in(testing_support::model_path("gate.model"));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string replaced(std::string text, const std::string& from, const std::string& to)
{
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

} // namespace

TEST_CASE("bundled gate model loads")
{
    const auto& doc = gate();
    CHECK(doc.name == "gate");
    CHECK(doc.model->loci().size() == 2);
    CHECK(doc.model->functionality_count() == 2);
    CHECK(doc.model->duration("arm") == 0.5);
    CHECK(doc.constraints.size() == 1);
    CHECK(doc.cruxes.size() == 1);
    CHECK(doc.crux_named("FIRE").entry_loci == std::set<std::string>{"IDLE"});
    CHECK_THROWS_AS(doc.crux_named("nope"), domain_error);
    CHECK(doc.start_step() == make_consistent_step(*doc.model, "IDLE", ch({{"mode", 0}, {"sensor", 0}})));
    CHECK(doc.pattern.independent.at("sensor").weights == std::vector<double>{0.75, 0.25});
    CHECK_NOTHROW(load_model(testing_support::model_path("gate_faulty.model")));
}

TEST_CASE("a locator missing a locus fails validation")
{
    try {
        (void)load_model(fixture_path("locator_not_total.model"));
        FAIL("expected validation error");
    } catch (const validation_error& e) {
        CHECK(e.check() == "locator not total");
        CHECK(std::string(e.what()).find("FIRE") != std::string::npos);
    }
}

TEST_CASE("an assignment escaping its domain names the variable and the stimulus")
{
    try {
        (void)load_model(fixture_path("range_escape.model"));
        FAIL("expected validation error");
    } catch (const validation_error& e) {
        CHECK(e.check() == "range check failed");
        const std::string what = e.what();
        CHECK(what.find("'mode'") != std::string::npos);
        CHECK(what.find("{mode=1, sensor=0}") != std::string::npos);
    }
}

TEST_CASE("parse errors are located in the source")
{
    try {
        (void)load_model(fixture_path("bad_filter.model"));
        FAIL("expected parse error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 30);
        CHECK(e.column() == 57);
    }
    try {
        (void)load_model(fixture_path("malformed.model"));
        FAIL("expected parse error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 16);
    }
    CHECK_THROWS_AS(load_model(fixture_path("does_not_exist.model")), error);
}

TEST_CASE("schema violations")
{
    const auto text = gate_text();
    CHECK_NOTHROW(parse_model(text));
    CHECK_THROWS_AS(parse_model(replaced(text, "\"kind\": \"volatile\"", "\"kind\": \"sometimes\"")), error);
    CHECK_THROWS_AS(parse_model(replaced(text, "\"weights\": [0.75, 0.25]", "\"weights\": [0.75, 0.5]")), error);
    CHECK_THROWS_AS(parse_model(replaced(text, "\"predicate\": \"mode = 1\"", "\"predicate\": \"speed = 1\"")), error);
    CHECK_THROWS_AS(parse_model(replaced(text, "\"locus\": \"FIRE\", \"filter\"", "\"locus\": \"ARMED\", \"filter\"")),
                    error);
    CHECK_THROWS_AS(parse_model(replaced(text, "\"duration_seconds\": 0.5", "\"duration_seconds\": 0")), error);
    CHECK_THROWS_AS(parse_model(replaced(text, "\"stimulus\": {\"mode\": 0, \"sensor\": 0}",
                                         "\"stimulus\": {\"mode\": 4, \"sensor\": 0}")),
                    error);
    // A too-small enumeration bound is a capacity problem, not a crash.
    CHECK_THROWS_AS(parse_model(text, 3), capacity_error);
    CHECK_NOTHROW(parse_model(text, 4));
}

TEST_CASE("crux resolution")
{
    const auto& a = *gate().model;
    const auto s = resolve_crux(a, gate().crux_named("FIRE"));
    CHECK(s.fr.abscissa == ch({{"mode", 1}, {"sensor", 0}}));
    crux_spec unfiltered{"any", "FIRE", std::nullopt, {}};
    CHECK(resolve_crux(a, unfiltered).fr.abscissa == ch({{"mode", 0}, {"sensor", 0}}));
    crux_spec impossible{"never", "FIRE", expression::parse("out.mode = 1"), {}};
    CHECK_THROWS_AS(resolve_crux(a, impossible), domain_error);
}

TEST_CASE("JSON round trips")
{
    const auto& a = *gate().model;
    for (const value& v : {value{std::int64_t{-3}}, value{std::string{"red"}}})
        CHECK(value_from_json(to_json(v)) == v);
    const auto psi = ch({{"mode", 1}, {"sensor", 0}});
    CHECK(choice_from_json(to_json(psi)) == psi);
    CHECK(to_json(psi).dump() == R"({"mode":1,"sensor":0})");

    const auto s = make_consistent_step(a, "FIRE", psi);
    CHECK(step_from_json(to_json(s)) == s);

    const auto w = simulate_orbit(a, gate().start_step(), gate().pattern, 50);
    CHECK(walk_from_json(to_json(w)) == w);
    CHECK(walk_from_json(json::parse(to_json(w).dump())) == w);

    const auto c = build_cone(a, resolve_crux(a, gate().crux_named("FIRE")), stopping_rule{3, {"IDLE"}});
    CHECK(cone_from_json(json::parse(to_json(c).dump())) == c);

    const auto p = estimate_relative_profile(w, step_predicate::at_loci({"FIRE"}), 3);
    CHECK(profile_from_json(json::parse(to_json(p).dump())) == p);

    const auto sampler = bind_profile_to_edge(c, nullptr);
    demonstration_options opts;
    opts.sample_size = 20;
    opts.seed = 5;
    opts.edge_norm_per_second = 0.31;
    const auto r = run_demonstration(a, sampler, gate().constraints, opts);
    CHECK(report_from_json(json::parse(to_json(r).dump())) == r);

    const auto faulty = load_model(testing_support::model_path("gate_faulty.model"));
    opts.implementation = faulty.model.get();
    opts.sample_size = 40;
    const auto failing = run_demonstration(a, sampler, gate().constraints, opts);
    REQUIRE(failing.failures > 0);
    CHECK(report_from_json(json::parse(to_json(failing).dump())) == failing);
    CHECK(to_json(failing)["outcome"] == "fail");
    CHECK(to_json(r)["outcome"] == "pass");
}

TEST_CASE("report text is stable")
{
    const auto& a = *gate().model;
    const auto c = build_cone(a, resolve_crux(a, gate().crux_named("FIRE")), stopping_rule{3, {"IDLE"}});
    demonstration_options opts;
    opts.sample_size = 10;
    opts.seed = 1;
    const auto r = run_demonstration(a, bind_profile_to_edge(c, nullptr), gate().constraints, opts);
    const auto text = report_text(r);
    CHECK(text == report_text(r));
    CHECK(text.find("10") != std::string::npos);
    CHECK(text.find("pass") != std::string::npos);
}
