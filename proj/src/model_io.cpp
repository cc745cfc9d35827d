#include "safedemo/model_io.hpp"

#include "safedemo/error.hpp"
#include "safedemo/risk.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace safedemo {

namespace {

struct position
{
    std::size_t line = 1;
    std::size_t column = 1;
};

position position_at(std::string_view text, std::size_t offset)
{
    position p;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++p.line;
            p.column = 1;
        } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
            ++p.column;
        }
    }
    return p;
}

// Reads the document and reports errors against source positions. Values
// carry no positions once parsed, so an error is pinned to the first
// occurrence of the offending literal or key in the source text.
class document_reader
{
public:
    explicit document_reader(std::string_view text) : _text{text} {}

    [[noreturn]] void fail(const std::string& path, const std::string& what, const std::string& anchor = {}) const
    {
        position p;
        if (!anchor.empty()) {
            const auto at = _text.find(anchor);
            if (at != std::string_view::npos)
                p = position_at(_text, at);
        }
        throw parse_error(path + ": " + what, p.line, p.column);
    }

    const json& member(const json& object, const std::string& key, const std::string& path) const
    {
        if (!object.is_object())
            fail(path, "expected an object");
        const auto it = object.find(key);
        if (it == object.end())
            fail(path, "missing member '" + key + "'");
        return *it;
    }

    std::string string_at(const json& j, const std::string& path, const std::string& key) const
    {
        if (!j.is_string())
            fail(path, "expected a string", "\"" + key + "\"");
        return j.get<std::string>();
    }

    const json& array_at(const json& j, const std::string& path, const std::string& key) const
    {
        if (!j.is_array())
            fail(path, "expected an array", "\"" + key + "\"");
        return j;
    }

    expression expr(const json& j, const std::string& path) const
    {
        if (!j.is_string())
            fail(path, "expected an expression string");
        const auto text = j.get<std::string>();
        try {
            return expression::parse(text);
        } catch (const parse_error& e) {
            const auto literal = json(text).dump();
            const auto at = _text.find(literal);
            position p;
            if (at != std::string_view::npos) {
                p = position_at(_text, at);
                // +1 for the opening quote; exact for single-line literals without escapes.
                if (e.line() == 1)
                    p.column += e.column();
                else
                    p = {p.line + e.line() - 1, e.column()};
            }
            std::string what = e.what();
            what = what.substr(what.find(": ") + 2);
            throw parse_error(path + ": " + what + " in '" + text + "'", p.line, p.column);
        }
    }

    value scalar(const json& j, const std::string& path) const
    {
        if (j.is_number_integer())
            return j.get<std::int64_t>();
        if (j.is_string() && !j.get<std::string>().empty())
            return j.get<std::string>();
        fail(path, "domain values must be integers or non-empty symbols");
    }

private:
    std::string_view _text;
};

assignment read_assignment(const document_reader& r, const json& j, const std::string& path)
{
    if (j.is_string())
        return assignment{{}, r.expr(j, path)};
    if (!j.is_array() || j.empty())
        r.fail(path, "assignment must be an expression or a non-empty list of cases");
    assignment a{{}, expression::always()};
    bool has_fallback = false;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto p = path + "/" + std::to_string(i);
        const auto& arm = j[i];
        auto result = r.expr(r.member(arm, "value", p), p + "/value");
        if (arm.contains("when")) {
            if (has_fallback)
                r.fail(p, "case after the unguarded fallback");
            a.cases.push_back({r.expr(arm["when"], p + "/when"), std::move(result)});
        } else {
            if (has_fallback)
                r.fail(p, "more than one unguarded fallback");
            a.fallback = std::move(result);
            has_fallback = true;
        }
    }
    if (!has_fallback)
        r.fail(path, "assignment has no unguarded fallback case");
    return a;
}

selector read_selector(const document_reader& r, const std::string& name, const json& j, const std::string& path,
                       const char* target_key)
{
    std::vector<guarded_name> rules;
    if (j.contains("rules")) {
        const auto& arr = r.array_at(j["rules"], path + "/rules", "rules");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto p = path + "/rules/" + std::to_string(i);
            rules.push_back({r.expr(r.member(arr[i], "when", p), p + "/when"),
                             r.string_at(r.member(arr[i], target_key, p), p + "/" + target_key, target_key)});
        }
    }
    auto fallback = r.string_at(r.member(j, "default", path), path + "/default", "default");
    return selector{name, std::move(rules), std::move(fallback)};
}

usage_pattern read_pattern(const document_reader& r, const json& j, const std::string& path)
{
    usage_pattern p;
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned())
            r.fail(path + "/seed", "seed must be a non-negative integer", "\"seed\"");
        p.seed = j["seed"].get<std::uint64_t>();
    }
    const auto mode = j.contains("mode") ? r.string_at(j["mode"], path + "/mode", "mode") : "independent";
    if (mode == "trace") {
        p.mode = usage_pattern::kind::trace;
        const auto& arr = r.array_at(r.member(j, "trace", path), path + "/trace", "trace");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            choice c;
            for (const auto& [k, v] : arr[i].items())
                c.assignments.emplace(k, r.scalar(v, path + "/trace/" + std::to_string(i) + "/" + k));
            p.trace.push_back(std::move(c));
        }
    } else if (mode == "independent") {
        const auto& dists = r.member(j, "distributions", path);
        for (const auto& [variable, d] : dists.items()) {
            const auto dp = path + "/distributions/" + variable;
            categorical<value> c;
            const auto& values = r.array_at(r.member(d, "values", dp), dp + "/values", "values");
            const auto& weights = r.array_at(r.member(d, "weights", dp), dp + "/weights", "weights");
            for (std::size_t i = 0; i < values.size(); ++i)
                c.outcomes.push_back(r.scalar(values[i], dp + "/values/" + std::to_string(i)));
            for (std::size_t i = 0; i < weights.size(); ++i) {
                if (!weights[i].is_number())
                    r.fail(dp + "/weights/" + std::to_string(i), "weight must be a number", "\"weights\"");
                c.weights.push_back(weights[i].get<double>());
            }
            p.independent.emplace(variable, std::move(c));
        }
    } else {
        r.fail(path + "/mode", "usage pattern mode must be 'independent' or 'trace'", "\"mode\"");
    }
    return p;
}

} // namespace

const crux_spec& model_document::crux_named(const std::string& name) const
{
    for (const auto& c : cruxes)
        if (c.name == name)
            return c;
    throw domain_error("model declares no crux named '" + name + "'");
}

step model_document::start_step() const
{
    if (start)
        return *start;
    const auto stimuli = enumerate_choice_space(model->stimulus_basis().stimulus());
    return make_consistent_step(*model, model->loci().front(), stimuli.front());
}

model_document parse_model(std::string_view text, std::uint64_t bound)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto p = position_at(text, e.byte == 0 ? 0 : e.byte - 1);
        std::string what = e.what();
        throw parse_error("malformed JSON: " + what, p.line, p.column);
    }
    const document_reader r{text};
    if (!root.is_object())
        r.fail("/", "model document must be a JSON object");

    model_document doc;
    doc.name = root.contains("name") ? r.string_at(root["name"], "/name", "name") : "model";

    std::map<std::string, ensemble::domain> stimulus;
    std::map<std::string, ensemble::domain> persistent;
    const auto& vars = r.array_at(r.member(root, "variables", ""), "/variables", "variables");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const auto p = "/variables/" + std::to_string(i);
        const auto name = r.string_at(r.member(vars[i], "name", p), p + "/name", "name");
        const auto kind = r.string_at(r.member(vars[i], "kind", p), p + "/kind", "kind");
        const auto& dom_json = r.array_at(r.member(vars[i], "domain", p), p + "/domain", "domain");
        ensemble::domain dom;
        for (std::size_t k = 0; k < dom_json.size(); ++k)
            dom.push_back(r.scalar(dom_json[k], p + "/domain/" + std::to_string(k)));
        if (stimulus.count(name))
            r.fail(p + "/name", "duplicate variable '" + name + "'", "\"" + name + "\"");
        if (kind != "persistent" && kind != "volatile")
            r.fail(p + "/kind", "kind must be 'persistent' or 'volatile'", "\"" + kind + "\"");
        if (kind == "persistent")
            persistent.emplace(name, dom);
        stimulus.emplace(name, std::move(dom));
    }

    std::optional<basis> b;
    try {
        b.emplace(ensemble{stimulus}, ensemble{persistent});
    } catch (const domain_error& e) {
        throw validation_error("invalid basis", e.what());
    }

    automaton::catalogs catalogs;
    const auto& fns = r.array_at(r.member(root, "functionalities", ""), "/functionalities", "functionalities");
    for (std::size_t i = 0; i < fns.size(); ++i) {
        const auto p = "/functionalities/" + std::to_string(i);
        const auto name = r.string_at(r.member(fns[i], "name", p), p + "/name", "name");
        const auto& dur = r.member(fns[i], "duration_seconds", p);
        if (!dur.is_number())
            r.fail(p + "/duration_seconds", "duration must be a number", "\"duration_seconds\"");
        std::map<std::string, assignment> assigns;
        const auto& assign_json = r.member(fns[i], "assign", p);
        if (!assign_json.is_object())
            r.fail(p + "/assign", "expected an object", "\"assign\"");
        for (const auto& [variable, a] : assign_json.items())
            assigns.emplace(variable, read_assignment(r, a, p + "/assign/" + variable));
        catalogs.functionalities.emplace_back(name, std::move(assigns), dur.get<double>());
    }

    const auto& acts = r.array_at(r.member(root, "actuators", ""), "/actuators", "actuators");
    for (std::size_t i = 0; i < acts.size(); ++i) {
        const auto p = "/actuators/" + std::to_string(i);
        catalogs.actuators.push_back(
            read_selector(r, r.string_at(r.member(acts[i], "name", p), p + "/name", "name"), acts[i], p, "select"));
    }

    const auto& loci = r.array_at(r.member(root, "loci", ""), "/loci", "loci");
    for (std::size_t i = 0; i < loci.size(); ++i)
        catalogs.loci.push_back(r.string_at(loci[i], "/loci/" + std::to_string(i), "loci"));

    const auto& locator = r.member(root, "locator", "");
    if (!locator.is_object())
        r.fail("/locator", "expected an object", "\"locator\"");
    for (const auto& [locus, act] : locator.items())
        catalogs.locator.emplace(locus, r.string_at(act, "/locator/" + locus, locus));

    const auto& jumps = r.member(root, "jumps", "");
    if (!jumps.is_object())
        r.fail("/jumps", "expected an object", "\"jumps\"");
    for (const auto& [locus, j] : jumps.items())
        catalogs.jumps.push_back(read_selector(r, locus, j, "/jumps/" + locus, "goto"));

    // Loading always range-checks exhaustively, so the stimulus space must fit.
    if (const auto n = b->stimulus().cardinality(); n > bound)
        throw capacity_error("stimulus space too large to validate", n, bound);
    doc.model = std::make_shared<const automaton>(std::move(*b), std::move(catalogs), bound);
    const auto& a = *doc.model;

    if (root.contains("usage_pattern"))
        doc.pattern = read_pattern(r, root["usage_pattern"], "/usage_pattern");
    else
        doc.pattern = usage_pattern::uniform(a, 0);
    try {
        doc.pattern.validate(a);
    } catch (const domain_error& e) {
        throw validation_error("invalid usage pattern", e.what());
    }

    if (root.contains("constraints")) {
        const auto& arr = r.array_at(root["constraints"], "/constraints", "constraints");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto p = "/constraints/" + std::to_string(i);
            safety_constraint c{r.string_at(r.member(arr[i], "name", p), p + "/name", "name"),
                                r.expr(r.member(arr[i], "predicate", p), p + "/predicate")};
            for (const auto& v : c.predicate.variables()) {
                const auto bare = v.rfind("out.", 0) == 0 ? v.substr(4) : v;
                const bool ok = v.rfind("out.", 0) == 0 ? a.persistent_indices().count(bare) != 0
                                                        : a.stimulus_basis().stimulus().contains(bare);
                if (!ok)
                    throw validation_error("unknown variable", "'" + v + "' in constraint '" + c.name + "'");
            }
            doc.constraints.push_back(std::move(c));
        }
    }

    if (root.contains("cruxes")) {
        const auto& arr = r.array_at(root["cruxes"], "/cruxes", "cruxes");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto p = "/cruxes/" + std::to_string(i);
            crux_spec c;
            c.name = r.string_at(r.member(arr[i], "name", p), p + "/name", "name");
            c.locus = r.string_at(r.member(arr[i], "locus", p), p + "/locus", "locus");
            if (!a.has_locus(c.locus))
                throw validation_error("unknown locus", "crux '" + c.name + "' names '" + c.locus + "'");
            if (arr[i].contains("filter"))
                c.filter = r.expr(arr[i]["filter"], p + "/filter");
            if (arr[i].contains("entry_loci")) {
                const auto& entry = r.array_at(arr[i]["entry_loci"], p + "/entry_loci", "entry_loci");
                for (std::size_t k = 0; k < entry.size(); ++k) {
                    auto locus = r.string_at(entry[k], p + "/entry_loci/" + std::to_string(k), "entry_loci");
                    if (!a.has_locus(locus))
                        throw validation_error("unknown locus", "crux '" + c.name + "' entry locus '" + locus + "'");
                    c.entry_loci.insert(std::move(locus));
                }
            }
            doc.cruxes.push_back(std::move(c));
        }
    }

    if (root.contains("start")) {
        const auto& s = root["start"];
        const auto locus = r.string_at(r.member(s, "locus", "/start"), "/start/locus", "locus");
        choice psi;
        const auto& stim = r.member(s, "stimulus", "/start");
        for (const auto& [k, v] : stim.items())
            psi.assignments.emplace(k, r.scalar(v, "/start/stimulus/" + k));
        try {
            doc.start = make_consistent_step(a, locus, psi);
        } catch (const domain_error& e) {
            throw validation_error("invalid start", e.what());
        }
    }
    return doc;
}

model_document load_model(const std::filesystem::path& path, std::uint64_t bound)
{
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw error("cannot read model file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), bound);
}

step resolve_crux(const automaton& a, const crux_spec& spec, std::uint64_t bound)
{
    if (!a.has_locus(spec.locus))
        throw domain_error("unknown crux locus '" + spec.locus + "'");
    for (const auto& psi : enumerate_choice_space(a.stimulus_basis().stimulus(), bound)) {
        auto s = make_consistent_step(a, spec.locus, psi);
        if (!spec.filter || spec.filter->test(frame_lookup(s.fr.abscissa, s.fr.ordinate)))
            return s;
    }
    throw domain_error("no step at locus '" + spec.locus + "' satisfies the filter of crux '" + spec.name + "'");
}

json to_json(const value& v)
{
    if (const auto* i = std::get_if<std::int64_t>(&v))
        return *i;
    return std::get<std::string>(v);
}

value value_from_json(const json& j)
{
    if (j.is_number_integer())
        return j.get<std::int64_t>();
    if (j.is_string())
        return j.get<std::string>();
    throw domain_error("expected an integer or symbol, got " + j.dump());
}

json to_json(const choice& c)
{
    json out = json::object();
    for (const auto& [k, v] : c.assignments)
        out[k] = to_json(v);
    return out;
}

choice choice_from_json(const json& j)
{
    if (!j.is_object())
        throw domain_error("expected a choice object, got " + j.dump());
    choice c;
    for (const auto& [k, v] : j.items())
        c.assignments.emplace(k, value_from_json(v));
    return c;
}

json to_json(const step& s)
{
    return json{{"locus", s.locus},
                {"functionality", s.functionality},
                {"abscissa", to_json(s.fr.abscissa)},
                {"ordinate", to_json(s.fr.ordinate)}};
}

step step_from_json(const json& j)
{
    return step{j.at("locus").get<std::string>(), j.at("functionality").get<std::string>(),
                frame{choice_from_json(j.at("abscissa")), choice_from_json(j.at("ordinate"))}};
}

json to_json(const walk& w)
{
    json steps = json::array();
    for (const auto& s : w.steps)
        steps.push_back(to_json(s));
    json excitations = json::array();
    for (const auto& x : w.excitations)
        excitations.push_back(to_json(x));
    return json{{"steps", std::move(steps)}, {"excitations", std::move(excitations)}};
}

walk walk_from_json(const json& j)
{
    walk w;
    for (const auto& s : j.at("steps"))
        w.steps.push_back(step_from_json(s));
    for (const auto& x : j.at("excitations"))
        w.excitations.push_back(choice_from_json(x));
    return w;
}

json to_json(const cone& c)
{
    json walks = json::array();
    for (const auto& w : c.walks) {
        json steps = json::array();
        for (const auto& s : w.steps)
            steps.push_back(to_json(s));
        walks.push_back(std::move(steps));
    }
    json entry = json::array();
    for (const auto& l : c.stopping.entry_loci)
        entry.push_back(l);
    return json{{"crux", to_json(c.crux)},
                {"stopping", {{"max_depth", c.stopping.max_depth}, {"entry_loci", std::move(entry)}}},
                {"walks", std::move(walks)},
                {"acyclic", c.acyclic}};
}

cone cone_from_json(const json& j)
{
    cone c;
    c.crux = step_from_json(j.at("crux"));
    c.stopping.max_depth = j.at("stopping").at("max_depth").get<std::size_t>();
    for (const auto& l : j.at("stopping").at("entry_loci"))
        c.stopping.entry_loci.insert(l.get<std::string>());
    for (const auto& w : j.at("walks")) {
        predecessor_walk pw;
        for (const auto& s : w)
            pw.steps.push_back(step_from_json(s));
        c.walks.push_back(std::move(pw));
    }
    c.acyclic = j.at("acyclic").get<bool>();
    return c;
}

json to_json(const relative_profile& p)
{
    json support = json::array();
    for (const auto& e : p.support)
        support.push_back(json{{"step", to_json(e.z)}, {"probability", e.probability}, {"count", e.count}});
    return json{{"reference", p.reference},
                {"support", std::move(support)},
                {"total_matches", p.total_matches},
                {"walk_length", p.walk_length},
                {"seed", p.seed}};
}

relative_profile profile_from_json(const json& j)
{
    relative_profile p;
    p.reference = j.at("reference").get<std::string>();
    for (const auto& e : j.at("support"))
        p.support.push_back(
            {step_from_json(e.at("step")), e.at("probability").get<double>(), e.at("count").get<std::size_t>()});
    p.total_matches = j.at("total_matches").get<std::size_t>();
    p.walk_length = j.at("walk_length").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

namespace {

json optional_number(const std::optional<double>& x)
{
    return x ? json(*x) : json(nullptr);
}

std::optional<double> number_or_null(const json& j, const char* key)
{
    const auto& v = j.at(key);
    if (v.is_null())
        return std::nullopt;
    return v.get<double>();
}

} // namespace

json to_json(const demonstration_report& r)
{
    json items = json::array();
    for (const auto& item : r.items) {
        json violated = json::array();
        for (const auto& v : item.violated)
            violated.push_back(v);
        items.push_back(json{{"walk", item.walk},
                             {"edge_step", to_json(item.edge_step)},
                             {"outcome", item.passed ? "pass" : "fail"},
                             {"violated", std::move(violated)}});
    }
    return json{
        {"crux", to_json(r.crux)},
        {"sample_size", r.sample_size},
        {"failures", r.failures},
        {"outcome", r.failures == 0 ? "pass" : "fail"},
        {"seed", r.seed},
        {"provenance", r.provenance},
        {"items", std::move(items)},
        {"alpha", false_rejection_probability},
        {"indifference_upper_bound", optional_number(r.indifference_upper_bound)},
        {"edge_norm_per_second", optional_number(r.edge_norm_per_second)},
        {"indemnification_per_second", optional_number(r.indemnification_per_second)},
        {"indemnification_per_hour",
         optional_number(r.indemnification_per_second ? std::optional<double>{*r.indemnification_per_second * 3600.0}
                                                      : std::nullopt)},
        {"failure_mle", r.failure_mle},
        {"reliability_growth_needed", r.reliability_growth_needed},
    };
}

demonstration_report report_from_json(const json& j)
{
    demonstration_report r;
    r.crux = step_from_json(j.at("crux"));
    r.sample_size = j.at("sample_size").get<std::uint64_t>();
    r.failures = j.at("failures").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.provenance = j.at("provenance").get<std::string>();
    for (const auto& i : j.at("items")) {
        demonstration_item item;
        item.walk = i.at("walk").get<std::size_t>();
        item.edge_step = step_from_json(i.at("edge_step"));
        item.passed = i.at("outcome").get<std::string>() == "pass";
        for (const auto& v : i.at("violated"))
            item.violated.push_back(v.get<std::string>());
        r.items.push_back(std::move(item));
    }
    r.indifference_upper_bound = number_or_null(j, "indifference_upper_bound");
    r.edge_norm_per_second = number_or_null(j, "edge_norm_per_second");
    r.indemnification_per_second = number_or_null(j, "indemnification_per_second");
    r.failure_mle = j.at("failure_mle").get<double>();
    r.reliability_growth_needed = j.at("reliability_growth_needed").get<bool>();
    return r;
}

std::string report_text(const demonstration_report& r)
{
    std::ostringstream out;
    char buf[256];
    out << "crux        " << to_string(r.crux) << "\n";
    out << "profile     " << r.provenance << "\n";
    out << "seed        " << r.seed << "\n";
    std::snprintf(buf, sizeof buf, "sample N    %llu\nfailures n  %llu\n",
                  static_cast<unsigned long long>(r.sample_size), static_cast<unsigned long long>(r.failures));
    out << buf;
    out << "\n" << "  #  walk  outcome  edge step\n";
    for (std::size_t i = 0; i < r.items.size(); ++i) {
        const auto& item = r.items[i];
        std::snprintf(buf, sizeof buf, "%3zu  %4zu  %-7s  ", i + 1, item.walk, item.passed ? "pass" : "FAIL");
        out << buf << to_string(item.edge_step);
        if (!item.violated.empty()) {
            out << "  violates";
            for (const auto& v : item.violated)
                out << " " << v;
        }
        out << "\n";
    }
    out << "\n";
    if (r.indifference_upper_bound) {
        std::snprintf(buf, sizeof buf, "indifference upper bound  %.5f\n", *r.indifference_upper_bound);
        out << buf;
        if (r.indemnification_per_second) {
            std::snprintf(buf, sizeof buf, "edge counting norm        %.6g /s\n", *r.edge_norm_per_second);
            out << buf;
            std::snprintf(buf, sizeof buf, "indemnification           %.6g /s  (%.6g /h)\n",
                          *r.indemnification_per_second, *r.indemnification_per_second * 3600.0);
            out << buf;
        }
    } else {
        std::snprintf(buf, sizeof buf, "failure proportion MLE    %.5f  (diagnostic only)\n", r.failure_mle);
        out << buf;
        out << "reliability growth needed; no indemnification\n";
    }
    return out.str();
}

} // namespace safedemo
