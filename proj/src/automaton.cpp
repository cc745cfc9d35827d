#include "safedemo/automaton.hpp"

#include "safedemo/error.hpp"

#include <algorithm>
#include <set>

namespace safedemo {

value assignment::evaluate(const choice& stimulus) const
{
    for (const auto& c : cases)
        if (c.guard.test(stimulus))
            return c.result.compute(stimulus);
    return fallback.compute(stimulus);
}

functionality::functionality(std::string name, std::map<std::string, assignment> assignments, double duration_seconds)
    : _name{std::move(name)}
    , _assignments{std::move(assignments)}
    , _duration{duration_seconds}
{
    if (!(_duration > 0.0))
        throw validation_error("duration not positive", "functionality '" + _name + "'");
}

choice functionality::evaluate(const choice& stimulus) const
{
    choice out;
    for (const auto& [variable, a] : _assignments)
        out.assignments.emplace(variable, a.evaluate(stimulus));
    return out;
}

selector::selector(std::string name, std::vector<guarded_name> rules, std::string fallback)
    : _name{std::move(name)}
    , _rules{std::move(rules)}
    , _fallback{std::move(fallback)}
{
}

const std::string& selector::select(const choice& stimulus) const
{
    for (const auto& r : _rules)
        if (r.guard.test(stimulus))
            return r.target;
    return _fallback;
}

std::strong_ordering operator<=>(const step& a, const step& b)
{
    if (auto c = a.locus <=> b.locus; c != 0)
        return c;
    if (auto c = a.fr.abscissa <=> b.fr.abscissa; c != 0)
        return c;
    if (auto c = a.functionality <=> b.functionality; c != 0)
        return c;
    return a.fr.ordinate <=> b.fr.ordinate;
}

std::string to_string(const step& s)
{
    return "(" + s.locus + ", " + s.functionality + ", " + to_string(s.fr.abscissa) + " -> "
           + to_string(s.fr.ordinate) + ")";
}

choice trace_source::next(std::size_t index)
{
    if (_pos >= _trace.size())
        throw truncation_error(index);
    return _trace[_pos++];
}

namespace {

void check_names(const std::vector<std::string>& names, const char* what)
{
    std::set<std::string> seen;
    for (const auto& n : names) {
        if (n.empty())
            throw validation_error("empty name", what);
        if (!seen.insert(n).second)
            throw validation_error("duplicate name", std::string(what) + " '" + n + "'");
    }
}

void check_references(const expression& e, const ensemble& stimulus, const std::string& where)
{
    for (const auto& v : e.variables())
        if (!stimulus.contains(v))
            throw validation_error("unknown variable", "'" + v + "' in " + where + " expression '" + e.text() + "'");
}

} // namespace

automaton::automaton(safedemo::basis b, catalogs c, std::uint64_t check_bound)
    : _basis{std::move(b)}
    , _partition{partition_basis(_basis)}
    , _persistent{_basis.persistent().indices()}
    , _volatile{_partition.volatile_indices()}
    , _loci{std::move(c.loci)}
    , _locator{std::move(c.locator)}
{
    const auto& psi = _basis.stimulus();

    if (_loci.empty())
        throw validation_error("no loci", "");
    check_names(_loci, "locus");

    {
        std::vector<std::string> names;
        for (const auto& f : c.functionalities)
            names.push_back(f.name());
        if (names.empty())
            throw validation_error("no functionalities", "");
        check_names(names, "functionality");
    }
    for (auto& f : c.functionalities) {
        for (const auto& index : _persistent)
            if (!f.assignments().count(index))
                throw validation_error("functionality incomplete",
                                       "'" + f.name() + "' does not assign persistent variable '" + index + "'");
        for (const auto& [variable, a] : f.assignments()) {
            if (!_persistent.count(variable))
                throw validation_error("assignment to non-persistent variable",
                                       "'" + f.name() + "' assigns '" + variable + "'");
            const auto where = "functionality '" + f.name() + "'";
            for (const auto& arm : a.cases) {
                check_references(arm.guard, psi, where);
                check_references(arm.result, psi, where);
            }
            check_references(a.fallback, psi, where);
        }
        _functionalities.emplace(f.name(), std::move(f));
    }

    {
        std::vector<std::string> names;
        for (const auto& a : c.actuators)
            names.push_back(a.name());
        if (names.empty())
            throw validation_error("no actuators", "");
        check_names(names, "actuator");
    }
    for (auto& a : c.actuators) {
        const auto where = "actuator '" + a.name() + "'";
        for (const auto& r : a.rules()) {
            check_references(r.guard, psi, where);
            if (!_functionalities.count(r.target))
                throw validation_error("dangling functionality reference", where + " selects '" + r.target + "'");
        }
        if (!_functionalities.count(a.fallback()))
            throw validation_error("dangling functionality reference", where + " defaults to '" + a.fallback() + "'");
        _actuators.emplace(a.name(), std::move(a));
    }

    std::set<std::string> located;
    for (const auto& [locus, actuator_name] : _locator) {
        if (!has_locus(locus))
            throw validation_error("locator names unknown locus", "'" + locus + "'");
        if (!_actuators.count(actuator_name))
            throw validation_error("dangling actuator reference", "locus '" + locus + "' -> '" + actuator_name + "'");
        located.insert(actuator_name);
    }
    for (const auto& locus : _loci)
        if (!_locator.count(locus))
            throw validation_error("locator not total", "no actuator for locus '" + locus + "'");
    for (const auto& [name, _] : _actuators)
        if (!located.count(name))
            throw validation_error("locator not surjective", "actuator '" + name + "' is assigned to no locus");

    for (auto& j : c.jumps) {
        const auto where = "jump from '" + j.name() + "'";
        if (!has_locus(j.name()))
            throw validation_error("jump names unknown locus", "'" + j.name() + "'");
        if (_jumps.count(j.name()))
            throw validation_error("duplicate jump", "'" + j.name() + "'");
        for (const auto& r : j.rules()) {
            check_references(r.guard, psi, where);
            if (!has_locus(r.target))
                throw validation_error("dangling locus reference", where + " targets '" + r.target + "'");
        }
        if (!has_locus(j.fallback()))
            throw validation_error("dangling locus reference", where + " defaults to '" + j.fallback() + "'");
        _jumps.emplace(j.name(), std::move(j));
    }
    for (const auto& locus : _loci)
        if (!_jumps.count(locus))
            throw validation_error("jump not total", "no jump rule for locus '" + locus + "'");

    if (psi.cardinality() <= check_bound) {
        for (const auto& stimulus : enumerate_choice_space(psi, check_bound)) {
            for (const auto& [name, f] : _functionalities) {
                try {
                    (void)apply(name, stimulus);
                } catch (const domain_error& e) {
                    throw validation_error("range check failed",
                                           "functionality '" + name + "' at " + to_string(stimulus) + ": " + e.what());
                }
            }
            for (const auto& [name, a] : _actuators) {
                try {
                    (void)a.select(stimulus);
                } catch (const domain_error& e) {
                    throw validation_error("guard type check failed",
                                           "actuator '" + name + "' at " + to_string(stimulus) + ": " + e.what());
                }
            }
            for (const auto& [name, j] : _jumps) {
                try {
                    (void)j.select(stimulus);
                } catch (const domain_error& e) {
                    throw validation_error("guard type check failed",
                                           "jump from '" + name + "' at " + to_string(stimulus) + ": " + e.what());
                }
            }
        }
    }
}

bool automaton::has_locus(const std::string& locus) const
{
    return std::find(_loci.begin(), _loci.end(), locus) != _loci.end();
}

const functionality& automaton::functionality_named(const std::string& name) const
{
    const auto it = _functionalities.find(name);
    if (it == _functionalities.end())
        throw domain_error("unknown functionality '" + name + "'");
    return it->second;
}

const std::string& automaton::select(const std::string& locus, const choice& stimulus) const
{
    const auto it = _locator.find(locus);
    if (it == _locator.end())
        throw domain_error("unknown locus '" + locus + "'");
    return _actuators.at(it->second).select(stimulus);
}

const std::string& automaton::jump(const std::string& locus, const choice& stimulus) const
{
    const auto it = _jumps.find(locus);
    if (it == _jumps.end())
        throw domain_error("unknown locus '" + locus + "'");
    return it->second.select(stimulus);
}

choice automaton::apply(const std::string& name, const choice& stimulus) const
{
    auto out = functionality_named(name).evaluate(stimulus);
    for (const auto& [variable, v] : out.assignments)
        if (!_basis.persistent().admits(variable, v))
            throw domain_error("value " + to_string(v) + " of '" + variable + "' escapes its domain");
    return out;
}

double automaton::duration(const std::string& name) const
{
    return functionality_named(name).duration();
}

void automaton::require_step(const step& s) const
{
    if (!has_locus(s.locus))
        throw domain_error("unknown locus '" + s.locus + "'");
    (void)functionality_named(s.functionality);
    if (!ensemble_admits(_basis.stimulus(), s.fr.abscissa))
        throw domain_error("abscissa " + to_string(s.fr.abscissa) + " is not a stimulus choice");
    if (!ensemble_admits(_basis.persistent(), s.fr.ordinate))
        throw domain_error("ordinate " + to_string(s.fr.ordinate) + " is not a persistent choice");
}

bool automaton::is_consistent(const step& s) const
{
    return apply(s.functionality, s.fr.abscissa) == s.fr.ordinate;
}

bool automaton::is_canonical(const step& s) const
{
    return select(s.locus, s.fr.abscissa) == s.functionality && is_consistent(s);
}

step make_consistent_step(const automaton& a, const std::string& locus, const choice& stimulus)
{
    if (!a.has_locus(locus))
        throw domain_error("unknown locus '" + locus + "'");
    if (!ensemble_admits(a.stimulus_basis().stimulus(), stimulus))
        throw domain_error("stimulus " + to_string(stimulus) + " is not a stimulus choice");
    const auto& f = a.select(locus, stimulus);
    return step{locus, f, frame{stimulus, a.apply(f, stimulus)}};
}

step transit(const automaton& a, const step& s, const choice& next_excitation)
{
    a.require_step(s);
    const auto& partition = a.partition();
    const bool admitted = partition.volatile_part ? ensemble_admits(*partition.volatile_part, next_excitation)
                                                  : next_excitation.empty();
    if (!admitted)
        throw domain_error("excitation " + to_string(next_excitation) + " is not a volatile choice");

    const auto& next_locus = a.jump(s.locus, s.fr.abscissa);
    auto next_stimulus = dyadic_product(a.apply(s.functionality, s.fr.abscissa), next_excitation);
    const auto& next_f = a.select(next_locus, next_stimulus);
    auto next_response = a.apply(next_f, next_stimulus);
    return step{next_locus, next_f, frame{std::move(next_stimulus), std::move(next_response)}};
}

walk run_walk(const automaton& a, const step& start, excitation_source& excitations, std::size_t length)
{
    if (length == 0)
        throw domain_error("walk length must be at least 1");
    a.require_step(start);
    walk w;
    w.steps.reserve(length);
    w.excitations.reserve(length - 1);
    w.steps.push_back(start);
    for (std::size_t i = 1; i < length; ++i) {
        auto xi = excitations.next(i - 1);
        w.steps.push_back(transit(a, w.steps.back(), xi));
        w.excitations.push_back(std::move(xi));
    }
    return w;
}

std::vector<std::string> path_projection(const walk& w)
{
    std::vector<std::string> out;
    out.reserve(w.steps.size());
    for (const auto& s : w.steps)
        out.push_back(s.locus);
    return out;
}

std::vector<frame> process_projection(const walk& w)
{
    std::vector<frame> out;
    out.reserve(w.steps.size());
    for (const auto& s : w.steps)
        out.push_back(s.fr);
    return out;
}

std::vector<std::string> procedure_projection(const walk& w)
{
    std::vector<std::string> out;
    out.reserve(w.steps.size());
    for (const auto& s : w.steps)
        out.push_back(s.functionality);
    return out;
}

bool conjoint(const automaton& a, const frame& earlier, const frame& later)
{
    return restrict_choice(later.abscissa, a.persistent_indices()) == earlier.ordinate;
}

bool successively_conjoint(const automaton& a, std::span<const frame> process)
{
    for (std::size_t i = 1; i < process.size(); ++i)
        if (!conjoint(a, process[i - 1], process[i]))
            return false;
    return true;
}

bool procedure_covers(const automaton& a, std::span<const std::string> procedure, std::span<const frame> process)
{
    if (procedure.size() != process.size())
        return false;
    for (std::size_t i = 0; i < process.size(); ++i)
        if (a.apply(procedure[i], process[i].abscissa) != process[i].ordinate)
            return false;
    return true;
}

pigeonhole_report check_under_pigeonhole(std::size_t catalog_size, std::span<const frame> prefix)
{
    std::map<choice, std::set<choice>> ordinates;
    for (const auto& f : prefix)
        ordinates[f.abscissa].insert(f.ordinate);

    pigeonhole_report report;
    for (const auto& [abscissa, set] : ordinates) {
        if (set.size() > report.max_homogeneous_count) {
            report.max_homogeneous_count = set.size();
            report.witness = abscissa;
        }
    }
    report.witnessed = catalog_size < report.max_homogeneous_count;
    return report;
}

} // namespace safedemo
