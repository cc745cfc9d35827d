// safedemo: command-line front end.
//
// Exit status: 0 success (demo: accepted), 2 demo rejected, 1 error,
// 64 usage error.

#include "safedemo/demonstration.hpp"
#include "safedemo/error.hpp"
#include "safedemo/model_io.hpp"
#include "safedemo/profile.hpp"
#include "safedemo/risk.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace safedemo;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_reject = 2;
constexpr int exit_usage = 64;

constexpr double hours_per_year = 24.0 * 365.25;

struct run_config
{
    std::string model_path;
    std::uint64_t seed = 0;
    std::size_t steps = 100000;
    std::uint64_t samples = 100;
    std::size_t depth = 1;
    std::vector<std::string> entry;
    bool entry_given = false;
    double confidence = 0.5;
    std::string format = "text";
    std::uint64_t bound = default_enumeration_bound;
    std::string crux;
    std::vector<std::string> loci;
    std::string impl_path;
    std::string edge_profile = "uniform";
    std::size_t norm_steps = 0;

    std::string which = "power";

    double lambda_per_hour = 0.0;
    double mu_loss = 1.0;
    double iota = 0.0;
    double hours = 1.0;
    double exposure_years = 1.0;
    std::optional<double> loss_dollars;
    bool eliminated = false;
    std::string report_path;
};

std::uint64_t default_seed()
{
    if (const char* env = std::getenv("SAFEDEMO_SEED")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0')
            return v;
        throw domain_error("SAFEDEMO_SEED must be an unsigned integer, got '" + std::string(env) + "'");
    }
    return 0;
}

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

stopping_rule stopping_for(const run_config& cfg, const crux_spec& spec)
{
    stopping_rule rule;
    rule.max_depth = cfg.depth;
    if (cfg.entry_given)
        rule.entry_loci = {cfg.entry.begin(), cfg.entry.end()};
    else
        rule.entry_loci = spec.entry_loci;
    return rule;
}

struct loaded
{
    model_document doc;
    const automaton& a() const { return *doc.model; }
};

loaded load(const run_config& cfg)
{
    if (cfg.bound < 1)
        throw domain_error("--bound must be at least 1");
    loaded l{load_model(cfg.model_path, cfg.bound)};
    if (cfg.bound < l.a().loci().size())
        throw domain_error("--bound must be at least the number of loci");
    return l;
}

int cmd_simulate(const run_config& cfg)
{
    const auto l = load(cfg);
    const auto w = simulate_orbit(l.a(), l.doc.start_step(), l.doc.pattern.with_seed(cfg.seed), cfg.steps);
    if (cfg.format == "json") {
        std::cout << to_json(w).dump(2) << "\n";
    } else if (cfg.format == "csv") {
        std::cout << "index,locus,functionality,abscissa,ordinate\r\n";
        for (std::size_t i = 0; i < w.steps.size(); ++i) {
            const auto& s = w.steps[i];
            std::cout << i << "," << s.locus << "," << s.functionality << ",\"" << to_string(s.fr.abscissa)
                      << "\",\"" << to_string(s.fr.ordinate) << "\"\r\n";
        }
    } else {
        for (std::size_t i = 0; i < w.steps.size(); ++i)
            std::cout << i << "  " << to_string(w.steps[i]) << "\n";
        std::cout << "elapsed " << fmt("%.6g", sync(l.a(), w, w.steps.size())) << " s\n";
    }
    return exit_ok;
}

step_predicate reference_for(const run_config& cfg, const loaded& l, std::optional<cone>& c)
{
    if (!cfg.crux.empty()) {
        const auto& spec = l.doc.crux_named(cfg.crux);
        c = build_cone(l.a(), resolve_crux(l.a(), spec, cfg.bound), stopping_for(cfg, spec), cfg.bound);
        return step_predicate::members(edge(*c), "edge(" + cfg.crux + ")");
    }
    if (!cfg.loci.empty())
        return step_predicate::at_loci({cfg.loci.begin(), cfg.loci.end()});
    return step_predicate::all();
}

int cmd_profile(const run_config& cfg)
{
    const auto l = load(cfg);
    std::optional<cone> c;
    const auto z = reference_for(cfg, l, c);
    const auto w = simulate_orbit(l.a(), l.doc.start_step(), l.doc.pattern.with_seed(cfg.seed), cfg.steps);
    const auto profile = estimate_relative_profile(w, z, cfg.seed);
    const auto norm = counting_norm(l.a(), w, z, std::max<std::size_t>(1, cfg.steps / 10));

    if (cfg.format == "json") {
        json out{{"profile", to_json(profile)},
                 {"absolute_probability", absolute_profile(w, z)},
                 {"norm", {{"per_second", norm.value}, {"per_hour", norm.value * 3600.0},
                           {"window_relative_change", norm.window_delta}, {"steps", norm.steps_used}}}};
        std::cout << out.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        std::cout << "step,count,probability\r\n";
        for (const auto& e : profile.support)
            std::cout << "\"" << to_string(e.z) << "\"," << e.count << "," << fmt("%.6f", e.probability) << "\r\n";
    } else {
        std::cout << "reference   " << profile.reference << "\n";
        std::cout << "orbit       " << profile.walk_length << " steps, seed " << profile.seed << "\n";
        std::cout << "matches     " << profile.total_matches << "  (P(Z) = " << fmt("%.6f", absolute_profile(w, z))
                  << ")\n\n";
        for (const auto& e : profile.support)
            std::cout << fmt("%.6f", e.probability) << "  " << e.count << "  " << to_string(e.z) << "\n";
        std::cout << "\ncounting norm  " << fmt("%.6g", norm.value) << " /s  (" << fmt("%.6g", norm.value * 3600.0)
                  << " /h), window change " << fmt("%.3g", norm.window_delta) << "\n";
    }
    return exit_ok;
}

int cmd_cone(const run_config& cfg)
{
    const auto l = load(cfg);
    const auto& spec = l.doc.crux_named(cfg.crux);
    const converse_solver solver{l.a(), cfg.bound};
    const auto c = build_cone(solver, resolve_crux(l.a(), spec, cfg.bound), stopping_for(cfg, spec));
    const bool complete = check_complete(solver, c.walks).complete;
    const bool independent = check_independent(c.walks);
    const bool bijective = edge_bijective(c);

    if (cfg.format == "json") {
        auto out = to_json(c);
        out["verdicts"] = {{"complete", complete}, {"independent", independent}, {"acyclic", c.acyclic},
                           {"edge_bijective", bijective}};
        std::cout << out.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        std::cout << "walk,index,step\r\n";
        for (std::size_t i = 0; i < c.walks.size(); ++i)
            for (std::size_t k = 0; k < c.walks[i].size(); ++k)
                std::cout << i << ",-" << k << ",\"" << to_string(c.walks[i].steps[k]) << "\"\r\n";
    } else {
        std::cout << "crux  " << to_string(c.crux) << "\n";
        std::cout << "walks " << c.walks.size() << "\n";
        for (std::size_t i = 0; i < c.walks.size(); ++i) {
            std::cout << "\n[" << i << "]\n";
            for (std::size_t k = 0; k < c.walks[i].size(); ++k)
                std::cout << "  " << (k == 0 ? " 0" : "-" + std::to_string(k)) << "  "
                          << to_string(c.walks[i].steps[k]) << "\n";
        }
        auto yn = [](bool b) { return b ? "yes" : "no"; };
        std::cout << "\ncomplete        " << yn(complete) << "\nindependent     " << yn(independent)
                  << "\nacyclic         " << yn(c.acyclic) << "\nedge bijective  " << yn(bijective) << "\n";
    }
    return exit_ok;
}

int cmd_demo(const run_config& cfg)
{
    const auto l = load(cfg);
    const auto& spec = l.doc.crux_named(cfg.crux);
    const auto c = build_cone(l.a(), resolve_crux(l.a(), spec, cfg.bound), stopping_for(cfg, spec), cfg.bound);

    std::optional<relative_profile> profile;
    demonstration_options options;
    options.sample_size = cfg.samples;
    options.seed = cfg.seed;

    if (cfg.norm_steps > 0 || cfg.edge_profile == "estimated") {
        const auto steps = cfg.norm_steps > 0 ? cfg.norm_steps : cfg.steps;
        const auto z = step_predicate::members(edge(c), "edge(" + cfg.crux + ")");
        const auto w = simulate_orbit(l.a(), l.doc.start_step(), l.doc.pattern.with_seed(cfg.seed), steps);
        if (cfg.norm_steps > 0)
            options.edge_norm_per_second = counting_norm(l.a(), w, z, std::max<std::size_t>(1, steps / 10)).value;
        if (cfg.edge_profile == "estimated")
            profile = estimate_relative_profile(w, z, cfg.seed);
    }

    std::optional<model_document> impl;
    if (!cfg.impl_path.empty()) {
        impl = load_model(cfg.impl_path, cfg.bound);
        options.implementation = impl->model.get();
    }

    const auto sampler = bind_profile_to_edge(c, profile ? &*profile : nullptr);
    const auto report = run_demonstration(l.a(), sampler, l.doc.constraints, options);

    std::optional<double> bound;
    if (report.failures == 0)
        bound = upper_bound(report.sample_size, cfg.confidence);

    if (cfg.format == "json") {
        auto out = to_json(report);
        out["upper_bound"] = {{"confidence", cfg.confidence}, {"value", bound ? json(*bound) : json(nullptr)}};
        std::cout << out.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        std::cout << "draw,walk,outcome,edge_step\r\n";
        for (std::size_t i = 0; i < report.items.size(); ++i)
            std::cout << i + 1 << "," << report.items[i].walk << "," << (report.items[i].passed ? "pass" : "fail")
                      << ",\"" << to_string(report.items[i].edge_step) << "\"\r\n";
    } else {
        std::cout << report_text(report);
        if (bound && cfg.confidence != 0.5)
            std::cout << "upper bound at " << fmt("%g", cfg.confidence) << "   " << fmt("%.5f", *bound) << "\n";
    }
    return report.failures == 0 ? exit_ok : exit_reject;
}

int cmd_risk(const run_config& cfg)
{
    double lambda = cfg.lambda_per_hour;
    std::string source = "flags";
    if (!cfg.report_path.empty()) {
        std::ifstream in{cfg.report_path};
        if (!in)
            throw error("cannot read report '" + cfg.report_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        const auto report = report_from_json(json::parse(buf.str()));
        if (!report.indemnification_per_second)
            throw precondition_error("report carries no indemnification (failures observed or no edge norm)");
        lambda = *report.indemnification_per_second * 3600.0;
        source = "report " + cfg.report_path;
    }
    const compound_poisson_model m{lambda, cfg.mu_loss, cfg.iota};
    const double h = statistical_risk(m);
    const double expected = cpp_expectation(m, cfg.hours);
    const double p = probability_of_occurrence((1.0 - cfg.iota) * lambda, cfg.exposure_years * hours_per_year);
    const double loss = cfg.loss_dollars.value_or(cfg.mu_loss);
    const auto a = assess(p, loss, cfg.eliminated);

    if (cfg.format == "json") {
        json out{{"source", source},
                 {"lambda_per_hour", lambda},
                 {"loss_mean", cfg.mu_loss},
                 {"idle_ratio", cfg.iota},
                 {"statistical_risk_per_hour", h},
                 {"expected_loss", {{"hours", cfg.hours}, {"value", expected}}},
                 {"probability_of_occurrence", {{"years", cfg.exposure_years}, {"value", p}}},
                 {"assessment",
                  {{"severity_category", a.severity_category},
                   {"severity", category_description(a.severity_category)},
                   {"level", to_string(a.level)},
                   {"level_description", level_description(a.level)},
                   {"risk", to_string(a.risk)}}}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "source                 " << source << "\n";
        std::cout << "arrival rate           " << fmt("%.6g", lambda) << " /h\n";
        std::cout << "mean loss              " << fmt("%.6g", cfg.mu_loss) << "\n";
        std::cout << "idle ratio             " << fmt("%.6g", cfg.iota) << "\n";
        std::cout << "statistical risk h     " << fmt("%.6g", h) << " /h\n";
        std::cout << "expected loss          " << fmt("%.6g", expected) << " over " << fmt("%g", cfg.hours)
                  << " h\n";
        std::cout << "P(occurrence)          " << fmt("%.6g", p) << " over " << fmt("%g", cfg.exposure_years)
                  << " y\n";
        std::cout << "severity               " << a.severity_category << " ("
                  << category_description(a.severity_category) << ")\n";
        std::cout << "probability level      " << to_string(a.level) << " (" << level_description(a.level) << ")\n";
        std::cout << "risk                   " << to_string(a.risk) << "\n";
    }
    return exit_ok;
}

int cmd_tables(const run_config& cfg)
{
    if (cfg.format == "json")
        throw domain_error("tables support --format text or csv");
    const auto format = cfg.format == "csv" ? table_format::csv : table_format::text;
    if (cfg.which == "power")
        std::cout << power_table(format);
    else if (cfg.which == "indifference")
        std::cout << indifference_table(format);
    else
        std::cout << risk_matrix_table(format);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    run_config cfg;
    try {
        cfg.seed = default_seed();
    } catch (const std::exception& e) {
        std::cerr << "safedemo: " << e.what() << "\n";
        return exit_usage;
    }

    CLI::App app{"Safety demonstrations over guarded automata"};
    app.require_subcommand(1);
    const auto formats = CLI::IsMember({"text", "json", "csv"});

    auto common = [&](CLI::App* sub, bool model) {
        if (model)
            sub->add_option("--model", cfg.model_path, "Model document")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", cfg.seed, "Seed (default $SAFEDEMO_SEED or 0)");
        sub->add_option("--format", cfg.format, "Output format")->check(formats);
        sub->add_option("--bound", cfg.bound, "Enumeration bound")->check(CLI::PositiveNumber);
    };
    auto cone_flags = [&](CLI::App* sub) {
        sub->add_option("--crux", cfg.crux, "Named crux from the model")->required();
        sub->add_option("--depth", cfg.depth, "Maximum cone depth")->check(CLI::PositiveNumber);
        sub->add_option("--entry", cfg.entry, "Entry locus ending walks (repeatable)");
    };

    auto* simulate = app.add_subcommand("simulate", "Dump an orbit under the usage pattern");
    common(simulate, true);
    simulate->add_option("--steps", cfg.steps, "Orbit length")->check(CLI::PositiveNumber);

    auto* profile = app.add_subcommand("profile", "Estimate a relative profile and counting norm");
    common(profile, true);
    profile->add_option("--steps", cfg.steps, "Orbit length")->check(CLI::PositiveNumber);
    profile->add_option("--locus", cfg.loci, "Reference loci (repeatable)");
    profile->add_option("--crux", cfg.crux, "Use the edge of this crux's cone as reference");
    profile->add_option("--depth", cfg.depth, "Maximum cone depth")->check(CLI::PositiveNumber);
    profile->add_option("--entry", cfg.entry, "Entry locus ending walks (repeatable)");

    auto* cone_cmd = app.add_subcommand("cone", "Build the cone of a crux and check it");
    common(cone_cmd, true);
    cone_flags(cone_cmd);

    auto* demo = app.add_subcommand("demo", "Run a safety demonstration");
    common(demo, true);
    cone_flags(demo);
    demo->add_option("--samples", cfg.samples, "Sample size N")->check(CLI::PositiveNumber);
    demo->add_option("--impl", cfg.impl_path, "Implementation under test")->check(CLI::ExistingFile);
    demo->add_option("--edge-profile", cfg.edge_profile, "Edge profile")
        ->check(CLI::IsMember({"uniform", "estimated"}));
    demo->add_option("--norm-steps", cfg.norm_steps, "Orbit length for the edge counting norm");
    demo->add_option("--steps", cfg.steps, "Orbit length for an estimated edge profile")
        ->check(CLI::PositiveNumber);
    demo->add_option("--confidence", cfg.confidence, "Confidence of the reported upper bound")
        ->check(CLI::Range(0.0, 1.0));

    auto* risk = app.add_subcommand("risk", "Compound Poisson risk and MIL-STD-882E assessment");
    common(risk, false);
    risk->add_option("--lambda-per-hour", cfg.lambda_per_hour, "Accident rate per hour")
        ->check(CLI::NonNegativeNumber);
    risk->add_option("--mu-loss", cfg.mu_loss, "Mean loss per accident")->check(CLI::NonNegativeNumber);
    risk->add_option("--iota", cfg.iota, "Idle ratio")->check(CLI::Range(0.0, 1.0));
    risk->add_option("--hours", cfg.hours, "Horizon of the expected loss")->check(CLI::NonNegativeNumber);
    risk->add_option("--exposure-years", cfg.exposure_years, "Horizon of the occurrence probability")
        ->check(CLI::NonNegativeNumber);
    risk->add_option("--loss-dollars", cfg.loss_dollars, "Monetary loss for the severity category");
    risk->add_flag("--eliminated", cfg.eliminated, "Hazard eliminated (level F)");
    risk->add_option("--report", cfg.report_path, "Demonstration report JSON supplying the rate")
        ->check(CLI::ExistingFile);

    auto* tables = app.add_subcommand("tables", "Print the reference tables");
    common(tables, false);
    tables->add_option("--which", cfg.which, "Table")->check(CLI::IsMember({"power", "indifference", "matrix"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }
    cfg.entry_given = !cfg.entry.empty();

    try {
        if (*simulate)
            return cmd_simulate(cfg);
        if (*profile)
            return cmd_profile(cfg);
        if (*cone_cmd)
            return cmd_cone(cfg);
        if (*demo)
            return cmd_demo(cfg);
        if (*risk)
            return cmd_risk(cfg);
        return cmd_tables(cfg);
    } catch (const parse_error& e) {
        std::cerr << cfg.model_path << ":" << e.what() << "\n";
    } catch (const validation_error& e) {
        std::cerr << "safedemo: validation failed: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "safedemo: " << e.what() << "\n";
    }
    return exit_error;
}
