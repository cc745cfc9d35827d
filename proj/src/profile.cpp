#include "safedemo/profile.hpp"

#include "safedemo/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace safedemo {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t run_index)
{
    return mix64(seed ^ mix64(run_index));
}

std::uint64_t random_stream::next_u64()
{
    _state += 0x9E3779B97F4A7C15ULL;
    auto z = _state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double random_stream::next_unit()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t draw_index(random_stream& rng, const std::vector<double>& weights)
{
    if (weights.empty())
        throw domain_error("cannot draw from an empty distribution");
    const double u = rng.next_unit();
    double cumulative = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cumulative += weights[i];
        if (u < cumulative)
            return i;
    }
    // Rounding left u above the final partial sum; take the last positive weight.
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0.0)
            return i;
    return weights.size() - 1;
}

void usage_pattern::validate(const automaton& a) const
{
    const auto& vol = a.partition().volatile_part;
    if (mode == kind::trace) {
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const bool ok = vol ? ensemble_admits(*vol, trace[i]) : trace[i].empty();
            if (!ok)
                throw domain_error("trace entry " + std::to_string(i) + " " + to_string(trace[i])
                                   + " is not a volatile choice");
        }
        return;
    }
    for (const auto& [variable, dist] : independent) {
        if (!vol || !vol->contains(variable))
            throw domain_error("usage pattern names non-volatile variable '" + variable + "'");
        if (dist.outcomes.size() != dist.weights.size() || dist.outcomes.empty())
            throw domain_error("usage pattern for '" + variable + "' is malformed");
        double sum = 0.0;
        for (std::size_t i = 0; i < dist.outcomes.size(); ++i) {
            if (!vol->admits(variable, dist.outcomes[i]))
                throw domain_error("usage pattern value " + to_string(dist.outcomes[i]) + " is outside the domain of '"
                                   + variable + "'");
            if (!(dist.weights[i] >= 0.0))
                throw domain_error("usage pattern for '" + variable + "' has a negative weight");
            sum += dist.weights[i];
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw domain_error("usage pattern for '" + variable + "' sums to " + std::to_string(sum));
    }
    if (vol)
        for (const auto& index : vol->indices())
            if (!independent.count(index))
                throw domain_error("usage pattern has no distribution for volatile variable '" + index + "'");
}

usage_pattern usage_pattern::uniform(const automaton& a, std::uint64_t seed)
{
    usage_pattern p;
    p.seed = seed;
    if (const auto& vol = a.partition().volatile_part) {
        for (const auto& [index, dom] : vol->terms()) {
            categorical<value> c;
            c.outcomes = dom;
            c.weights.assign(dom.size(), 1.0 / static_cast<double>(dom.size()));
            p.independent.emplace(index, std::move(c));
        }
    }
    return p;
}

usage_pattern usage_pattern::with_seed(std::uint64_t s) const
{
    auto copy = *this;
    copy.seed = s;
    return copy;
}

pattern_source::pattern_source(const automaton& a, const usage_pattern& pattern)
    : _pattern{pattern}
    , _rng{pattern.seed}
{
    _pattern.validate(a);
}

choice pattern_source::next(std::size_t index)
{
    if (_pattern.mode == usage_pattern::kind::trace) {
        if (_trace_pos >= _pattern.trace.size())
            throw truncation_error(index);
        return _pattern.trace[_trace_pos++];
    }
    choice out;
    for (const auto& [variable, dist] : _pattern.independent)
        out.assignments.emplace(variable, dist.outcomes[draw_index(_rng, dist.weights)]);
    return out;
}

step_predicate step_predicate::all()
{
    return step_predicate{};
}

step_predicate step_predicate::nothing()
{
    step_predicate p;
    p._empty = true;
    return p;
}

step_predicate step_predicate::at_loci(std::set<std::string> loci)
{
    step_predicate p;
    p._loci = std::move(loci);
    return p;
}

step_predicate step_predicate::members(step_set steps, std::string label)
{
    step_predicate p;
    p._members = std::move(steps);
    p._label = std::move(label);
    return p;
}

step_predicate step_predicate::with_functionalities(std::set<std::string> names) const
{
    auto p = *this;
    p._functionalities = std::move(names);
    return p;
}

step_predicate step_predicate::with_guard(expression guard) const
{
    auto p = *this;
    p._guard = std::move(guard);
    return p;
}

bool step_predicate::matches(const step& s) const
{
    if (_empty)
        return false;
    if (_loci && !_loci->count(s.locus))
        return false;
    if (_functionalities && !_functionalities->count(s.functionality))
        return false;
    if (_members && !_members->count(s))
        return false;
    if (_guard && !_guard->test(frame_lookup(s.fr.abscissa, s.fr.ordinate)))
        return false;
    return true;
}

std::string step_predicate::describe() const
{
    if (_empty)
        return "nothing";
    std::vector<std::string> parts;
    auto join = [](const std::set<std::string>& names) {
        std::string out;
        for (const auto& n : names)
            out += (out.empty() ? "" : ",") + n;
        return out;
    };
    if (_loci)
        parts.push_back("locus in {" + join(*_loci) + "}");
    if (_functionalities)
        parts.push_back("functionality in {" + join(*_functionalities) + "}");
    if (_members)
        parts.push_back(_label.empty() ? std::to_string(_members->size()) + " listed steps" : _label);
    if (_guard)
        parts.push_back("frame satisfies " + _guard->text());
    if (parts.empty())
        return "all steps";
    std::string out;
    for (const auto& p : parts)
        out += (out.empty() ? "" : " and ") + p;
    return out;
}

double relative_profile::probability(const step& s) const
{
    for (const auto& e : support)
        if (e.z == s)
            return e.probability;
    return 0.0;
}

double relative_profile::total() const
{
    double sum = 0.0;
    for (const auto& e : support)
        sum += e.probability;
    return sum;
}

walk simulate_orbit(const automaton& a, const step& start, const usage_pattern& pattern, std::size_t length)
{
    if (!a.is_consistent(start))
        throw domain_error("orbit start " + to_string(start) + " is not consistent");
    pattern_source source{a, pattern};
    return run_walk(a, start, source, length);
}

std::size_t count_arrivals(const walk& w, const step_predicate& z, std::size_t k)
{
    if (k > w.steps.size())
        throw domain_error("count horizon " + std::to_string(k) + " exceeds walk length "
                           + std::to_string(w.steps.size()));
    return static_cast<std::size_t>(
        std::count_if(w.steps.begin(), w.steps.begin() + static_cast<long>(k), [&](const step& s) { return z.matches(s); }));
}

relative_profile estimate_relative_profile(const walk& w, const step_predicate& z, std::uint64_t seed)
{
    std::map<step, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& s : w.steps) {
        if (z.matches(s)) {
            ++counts[s];
            ++total;
        }
    }
    if (total == 0)
        throw insufficient_data_error("no step of the walk matches " + z.describe());

    relative_profile out;
    out.reference = z.describe();
    out.total_matches = total;
    out.walk_length = w.steps.size();
    out.seed = seed;
    for (const auto& [s, n] : counts)
        out.support.push_back({s, static_cast<double>(n) / static_cast<double>(total), n});
    return out;
}

double sync(const automaton& a, const walk& w, std::size_t k)
{
    if (k > w.steps.size())
        throw domain_error("sync horizon " + std::to_string(k) + " exceeds walk length "
                           + std::to_string(w.steps.size()));
    double t = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        t += a.duration(w.steps[i].functionality);
    return t;
}

double absolute_profile(const walk& w, const step_predicate& z)
{
    if (w.steps.empty())
        return 0.0;
    return static_cast<double>(count_arrivals(w, z, w.steps.size())) / static_cast<double>(w.steps.size());
}

norm_estimate counting_norm(const automaton& a, const walk& w, const step_predicate& z, std::size_t window)
{
    const auto k = w.steps.size();
    if (window == 0 || k < 2 * window)
        throw precondition_error("counting norm needs a walk of at least two windows of " + std::to_string(window)
                                 + " steps, got " + std::to_string(k));
    std::size_t hits = 0;
    double elapsed = 0.0;
    double earlier = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (z.matches(w.steps[i]))
            ++hits;
        elapsed += a.duration(w.steps[i].functionality);
        if (i + 1 == k - window)
            earlier = static_cast<double>(hits) / elapsed;
    }
    norm_estimate out;
    out.value = static_cast<double>(hits) / elapsed;
    out.steps_used = k;
    out.window_delta = std::abs(out.value - earlier) / std::max(out.value, 1e-300);
    return out;
}

double max_pairwise_relative_deviation(const std::vector<double>& xs)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            const double scale = std::max(std::abs(xs[i]), std::abs(xs[j]));
            if (scale > 0.0)
                worst = std::max(worst, std::abs(xs[i] - xs[j]) / scale);
        }
    }
    return worst;
}

conjecture_report check_limit_conjectures(const automaton& a, const step& start,
                                          const std::vector<usage_pattern>& patterns, const step_predicate& z,
                                          const step_predicate& u, std::size_t length, double tolerance)
{
    if (patterns.size() < 2)
        throw precondition_error("limit conjecture check needs at least two runs");
    conjecture_report report;
    report.runs = patterns.size();
    report.length = length;
    report.tolerance = tolerance;
    for (const auto& pattern : patterns) {
        const auto orbit = simulate_orbit(a, start, pattern, length);
        std::size_t nz = 0;
        std::size_t nu = 0;
        for (const auto& s : orbit.steps) {
            if (z.matches(s)) {
                ++nz;
                // U must be a subset of Z.
                if (u.matches(s))
                    ++nu;
            }
        }
        report.count_ratios.push_back(nz == 0 ? 0.0 : static_cast<double>(nu) / static_cast<double>(nz));
        report.time_ratios.push_back(static_cast<double>(nz) / sync(a, orbit, length));
    }
    report.count_ratio_deviation = max_pairwise_relative_deviation(report.count_ratios);
    report.time_ratio_deviation = max_pairwise_relative_deviation(report.time_ratios);
    report.pass = report.count_ratio_deviation <= tolerance && report.time_ratio_deviation <= tolerance;
    return report;
}

conjecture_report check_limit_conjectures(const automaton& a, const step& start, const usage_pattern& pattern,
                                          const step_predicate& z, const step_predicate& u, std::size_t runs,
                                          std::size_t length, double tolerance)
{
    std::vector<usage_pattern> patterns;
    for (std::size_t r = 0; r < runs; ++r)
        patterns.push_back(pattern.with_seed(derive_seed(pattern.seed, r)));
    return check_limit_conjectures(a, start, patterns, z, u, length, tolerance);
}

} // namespace safedemo
