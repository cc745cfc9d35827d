#include "safedemo/demonstration.hpp"

#include "safedemo/error.hpp"
#include "safedemo/risk.hpp"

#include <map>

namespace safedemo {

bool safety_constraint::holds(const step& crux) const
{
    return predicate.test(frame_lookup(crux.fr.abscissa, crux.fr.ordinate));
}

edge_sampler::edge_sampler(const cone& c, std::vector<double> walk_probabilities, std::string provenance)
    : _cone{&c}
    , _probabilities{std::move(walk_probabilities)}
    , _provenance{std::move(provenance)}
{
    if (_probabilities.size() != c.walks.size())
        throw binding_error("sampler needs one probability per cone walk");
}

std::size_t edge_sampler::draw(random_stream& rng) const
{
    return draw_index(rng, _probabilities);
}

edge_sampler bind_profile_to_edge(const cone& c, const relative_profile* profile)
{
    if (!c.acyclic)
        throw precondition_error("cannot bind a profile to the edge of a cyclic cone");
    if (!edge_bijective(c))
        throw precondition_error("cone edge steps are not in one-to-one correspondence with its walks");

    const auto steps = edge_steps(c);
    if (profile == nullptr) {
        std::vector<double> uniform(steps.size(), 1.0 / static_cast<double>(steps.size()));
        return edge_sampler{c, std::move(uniform), "uniform"};
    }

    const auto members = edge(c);
    std::string offenders;
    for (const auto& e : profile->support)
        if (!members.count(e.z))
            offenders += (offenders.empty() ? "" : "; ") + to_string(e.z);
    if (!offenders.empty())
        throw binding_error("profile support outside the cone edge: " + offenders);

    std::vector<double> probabilities;
    probabilities.reserve(steps.size());
    double total = 0.0;
    for (const auto& s : steps) {
        probabilities.push_back(profile->probability(s));
        total += probabilities.back();
    }
    if (!(total > 0.0))
        throw binding_error("profile assigns no mass to the cone edge");
    for (auto& p : probabilities)
        p /= total;
    return edge_sampler{c, std::move(probabilities), "profile: " + profile->reference};
}

demonstration_item execute_test(const automaton& model, const cone& c, std::size_t walk,
                                const std::vector<safety_constraint>& constraints, const automaton* implementation)
{
    const auto& source = c.walks.at(walk);
    const auto test = to_test(source, walk);
    const auto replayed = replay(model, test);
    if (replayed.steps != test.steps)
        throw consistency_error("replay of cone walk " + std::to_string(walk) + " diverges from the walk");

    step observed = replayed.steps.back();
    if (implementation != nullptr) {
        const auto& edge_step = test.steps.front();
        const auto start = make_consistent_step(*implementation, edge_step.locus, edge_step.fr.abscissa);
        trace_source trace{test_excitations(model, test)};
        observed = run_walk(*implementation, start, trace, test.steps.size()).steps.back();
    }

    demonstration_item item;
    item.walk = walk;
    item.edge_step = source.edge_step();
    for (const auto& constraint : constraints)
        if (!constraint.holds(observed))
            item.violated.push_back(constraint.name);
    item.passed = item.violated.empty();
    return item;
}

std::vector<demonstration_item> evaluate_sample(const automaton& model, const cone& c,
                                                const std::vector<std::size_t>& walks,
                                                const std::vector<safety_constraint>& constraints,
                                                const automaton* implementation)
{
    std::map<std::size_t, demonstration_item> outcome;
    std::vector<demonstration_item> items;
    items.reserve(walks.size());
    for (const auto w : walks) {
        auto it = outcome.find(w);
        if (it == outcome.end())
            it = outcome.emplace(w, execute_test(model, c, w, constraints, implementation)).first;
        items.push_back(it->second);
    }
    return items;
}

demonstration_report run_demonstration(const automaton& model, const edge_sampler& sampler,
                                       const std::vector<safety_constraint>& constraints,
                                       const demonstration_options& options)
{
    if (options.sample_size < 1)
        throw domain_error("sample size must be at least 1");
    const auto& c = sampler.source();

    random_stream rng{options.seed};
    std::vector<std::size_t> drawn;
    drawn.reserve(options.sample_size);
    for (std::uint64_t i = 0; i < options.sample_size; ++i)
        drawn.push_back(sampler.draw(rng));

    demonstration_report report;
    report.crux = c.crux;
    report.sample_size = options.sample_size;
    report.seed = options.seed;
    report.provenance = sampler.provenance();
    report.items = evaluate_sample(model, c, drawn, constraints, options.implementation);
    for (const auto& item : report.items)
        if (!item.passed)
            ++report.failures;
    report.failure_mle = static_cast<double>(report.failures) / static_cast<double>(report.sample_size);

    if (report.failures == 0) {
        report.indifference_upper_bound = indifference_proportion(report.sample_size);
        if (options.edge_norm_per_second) {
            report.edge_norm_per_second = options.edge_norm_per_second;
            report.indemnification_per_second =
                indemnify(report.sample_size, *options.edge_norm_per_second).per_second;
        }
    } else {
        report.reliability_growth_needed = true;
    }
    return report;
}

} // namespace safedemo
