#include "safedemo/inference.hpp"

#include "safedemo/error.hpp"

#include <algorithm>
#include <limits>

namespace safedemo {

const step& predecessor_walk::at(long index) const
{
    if (index > 0 || static_cast<std::size_t>(-index) >= steps.size())
        throw domain_error("predecessor walk index " + std::to_string(index) + " out of range");
    return steps[static_cast<std::size_t>(-index)];
}

converse_solver::converse_solver(const automaton& a, std::uint64_t bound)
    : _automaton{a}
{
    const auto per_locus = a.stimulus_basis().stimulus().cardinality();
    const auto loci = static_cast<std::uint64_t>(a.loci().size());
    const auto total = per_locus > std::numeric_limits<std::uint64_t>::max() / loci
                           ? std::numeric_limits<std::uint64_t>::max()
                           : per_locus * loci;
    if (total > bound)
        throw capacity_error("converse candidate space too large", total, bound);

    const auto stimuli = enumerate_choice_space(a.stimulus_basis().stimulus(), bound);
    auto loci_sorted = a.loci();
    std::sort(loci_sorted.begin(), loci_sorted.end());
    _canonical.reserve(total);
    for (const auto& locus : loci_sorted) {
        for (const auto& psi : stimuli) {
            auto s = make_consistent_step(a, locus, psi);
            _by_successor[{a.jump(locus, psi), s.fr.ordinate}].push_back(_canonical.size());
            _canonical.push_back(std::move(s));
        }
    }
}

step_set converse_solver::converse(const step& target) const
{
    _automaton.require_step(target);
    step_set out;
    // Only canonical steps have forward pre-images.
    if (!_automaton.is_canonical(target))
        return out;
    const auto key = std::make_pair(target.locus, restrict_choice(target.fr.abscissa, _automaton.persistent_indices()));
    const auto it = _by_successor.find(key);
    if (it == _by_successor.end())
        return out;
    for (const auto i : it->second)
        out.insert(_canonical[i]);
    return out;
}

step_set converse(const automaton& a, const step& target, std::uint64_t bound)
{
    return converse_solver{a, bound}.converse(target);
}

std::vector<step_set> predecessor_generations(const automaton& a, const step& crux, std::size_t depth,
                                              std::uint64_t bound)
{
    if (!a.is_consistent(crux))
        throw domain_error("crux " + to_string(crux) + " is not consistent");
    const converse_solver solver{a, bound};
    std::vector<step_set> generations{step_set{crux}};
    for (std::size_t n = 0; n < depth; ++n) {
        step_set next;
        for (const auto& s : generations.back())
            next.merge(solver.converse(s));
        generations.push_back(std::move(next));
    }
    return generations;
}

namespace {

bool repeats_locus(const std::vector<step>& steps)
{
    const auto& last = steps.back().locus;
    return std::any_of(steps.begin(), steps.end() - 1, [&](const step& s) { return s.locus == last; });
}

void expand(const converse_solver& solver, const stopping_rule& stopping, std::vector<step>& prefix, cone& out)
{
    const auto depth = prefix.size() - 1;
    const bool cyclic = depth > 0 && repeats_locus(prefix);
    if (cyclic)
        out.acyclic = false;
    const bool terminal = cyclic || depth >= stopping.max_depth
                          || (depth > 0 && stopping.entry_loci.count(prefix.back().locus) != 0);
    if (!terminal) {
        const auto preds = solver.converse(prefix.back());
        if (!preds.empty()) {
            for (const auto& p : preds) {
                prefix.push_back(p);
                expand(solver, stopping, prefix, out);
                prefix.pop_back();
            }
            return;
        }
    }
    out.walks.push_back(predecessor_walk{prefix});
}

} // namespace

cone build_cone(const converse_solver& solver, const step& crux, const stopping_rule& stopping)
{
    const auto& a = solver.model();
    a.require_step(crux);
    if (!a.is_consistent(crux))
        throw domain_error("crux " + to_string(crux) + " is not consistent");
    if (stopping.max_depth < 1)
        throw domain_error("cone depth must be at least 1");
    for (const auto& locus : stopping.entry_loci)
        if (!a.has_locus(locus))
            throw domain_error("unknown entry locus '" + locus + "'");

    cone out{crux, {}, stopping, true};
    std::vector<step> prefix{crux};
    expand(solver, stopping, prefix, out);
    return out;
}

cone build_cone(const automaton& a, const step& crux, const stopping_rule& stopping, std::uint64_t bound)
{
    return build_cone(converse_solver{a, bound}, crux, stopping);
}

namespace {

struct step_ptr_less
{
    using is_transparent = void;
    bool operator()(const step* a, const step* b) const { return *a < *b; }
};

struct depth_step_less
{
    bool operator()(const std::pair<std::size_t, const step*>& a, const std::pair<std::size_t, const step*>& b) const
    {
        if (a.first != b.first)
            return a.first < b.first;
        return *a.second < *b.second;
    }
};

} // namespace

namespace {

// Walks merged on common crux-side prefixes.
struct prefix_node
{
    std::size_t first_walk = 0;
    std::map<const step*, prefix_node, step_ptr_less> children;
};

bool check_node(const converse_solver& solver, const step& at, const prefix_node& n, std::size_t depth,
                completeness_report& report)
{
    if (n.children.empty())
        return true;
    for (const auto& s : solver.converse(at)) {
        if (!n.children.count(&s)) {
            report.complete = false;
            report.counterexample = completeness_report::missing{n.first_walk, -static_cast<long>(depth), s};
            return false;
        }
    }
    for (const auto& [child, sub] : n.children)
        if (!check_node(solver, *child, sub, depth + 1, report))
            return false;
    return true;
}

} // namespace

completeness_report check_complete(const converse_solver& solver, std::span<const predecessor_walk> walks)
{
    std::map<const step*, prefix_node, step_ptr_less> roots;
    for (std::size_t wi = 0; wi < walks.size(); ++wi) {
        auto* level = &roots;
        for (const auto& s : walks[wi].steps) {
            auto [it, fresh] = level->try_emplace(&s);
            if (fresh)
                it->second.first_walk = wi;
            level = &it->second.children;
        }
    }
    completeness_report report;
    for (const auto& [crux, n] : roots)
        if (!check_node(solver, *crux, n, 0, report))
            break;
    return report;
}

completeness_report check_pointwise_complete(const converse_solver& solver, std::span<const predecessor_walk> walks)
{
    // Obligations depend only on (index, w_i), so each distinct node is
    // checked once against every e_{i-1} seen below it.
    struct node
    {
        std::size_t first_walk = 0;
        std::set<const step*, step_ptr_less> below;
    };
    std::map<std::pair<std::size_t, const step*>, node, depth_step_less> nodes;
    for (std::size_t wi = 0; wi < walks.size(); ++wi) {
        const auto& e = walks[wi];
        for (std::size_t k = 0; k + 1 < e.size(); ++k) {
            auto [it, fresh] = nodes.try_emplace({k, &e.steps[k]});
            if (fresh)
                it->second.first_walk = wi;
            it->second.below.insert(&e.steps[k + 1]);
        }
    }

    completeness_report report;
    for (const auto& [key, n] : nodes) {
        for (const auto& s : solver.converse(*key.second)) {
            if (!n.below.count(&s)) {
                report.complete = false;
                report.counterexample = completeness_report::missing{n.first_walk, -static_cast<long>(key.first), s};
                return report;
            }
        }
    }
    return report;
}

completeness_report check_complete(const automaton& a, std::span<const predecessor_walk> walks, std::uint64_t bound)
{
    return check_complete(converse_solver{a, bound}, walks);
}

completeness_report check_pointwise_complete(const automaton& a, std::span<const predecessor_walk> walks,
                                             std::uint64_t bound)
{
    return check_pointwise_complete(converse_solver{a, bound}, walks);
}

bool check_independent(std::span<const predecessor_walk> walks)
{
    for (std::size_t i = 0; i < walks.size(); ++i) {
        for (std::size_t j = 0; j < walks.size(); ++j) {
            if (i == j)
                continue;
            const auto& shorter = walks[i].steps;
            const auto& longer = walks[j].steps;
            if (shorter.size() <= longer.size() && std::equal(shorter.begin(), shorter.end(), longer.begin())) {
                // Equal duplicates are dependent on each other as well.
                return false;
            }
        }
    }
    return true;
}

bool walk_acyclic(const predecessor_walk& w)
{
    std::set<std::string> seen;
    for (const auto& s : w.steps)
        if (!seen.insert(s.locus).second)
            return false;
    return true;
}

step_set edge(const cone& c)
{
    step_set out;
    for (const auto& w : c.walks)
        out.insert(w.edge_step());
    return out;
}

std::vector<step> edge_steps(const cone& c)
{
    std::vector<step> out;
    out.reserve(c.walks.size());
    for (const auto& w : c.walks)
        out.push_back(w.edge_step());
    return out;
}

bool edge_bijective(const cone& c)
{
    return edge(c).size() == c.walks.size();
}

forward_test to_test(const predecessor_walk& w, std::size_t source)
{
    if (w.steps.empty())
        throw domain_error("cannot convert an empty predecessor walk");
    forward_test t;
    t.source = source;
    const auto n = static_cast<long>(w.size());
    t.steps.reserve(w.size());
    // t_i = w_{i-n} for i = 1..n
    for (long i = 1; i <= n; ++i)
        t.steps.push_back(w.at(i - n));
    return t;
}

predecessor_walk from_test(const forward_test& t)
{
    return predecessor_walk{std::vector<step>(t.steps.rbegin(), t.steps.rend())};
}

std::vector<choice> test_excitations(const automaton& a, const forward_test& t)
{
    std::vector<choice> out;
    for (std::size_t i = 1; i < t.steps.size(); ++i)
        out.push_back(restrict_choice(t.steps[i].fr.abscissa, a.volatile_indices()));
    return out;
}

walk replay(const automaton& a, const forward_test& t)
{
    trace_source trace{test_excitations(a, t)};
    return run_walk(a, t.steps.front(), trace, t.steps.size());
}

} // namespace safedemo
