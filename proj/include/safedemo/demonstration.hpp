#pragma once

// Safety demonstrations: sampling cone walks through a profile bound to the
// cone edge, replaying them as forward tests, and judging the crux.

#include "safedemo/inference.hpp"
#include "safedemo/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace safedemo {

// Predicate over the crux frame: Ψ names bind the abscissa and
// `out.<name>` the ordinate.
struct safety_constraint
{
    std::string name;
    expression predicate;

    [[nodiscard]] bool holds(const step& crux) const;
};

// Draws cone walks i.i.d. with the probability of their edge steps.
class edge_sampler
{
public:
    edge_sampler(const cone& c, std::vector<double> walk_probabilities, std::string provenance);

    [[nodiscard]] std::size_t draw(random_stream& rng) const;
    [[nodiscard]] const cone& source() const { return *_cone; }
    [[nodiscard]] const std::vector<double>& probabilities() const { return _probabilities; }
    [[nodiscard]] const std::string& provenance() const { return _provenance; }

private:
    const cone* _cone;
    std::vector<double> _probabilities;
    std::string _provenance;
};

// Binds a relative profile (or, when `profile` is null, the uniform
// distribution) to the edge of an acyclic cone. Throws precondition_error
// for cyclic cones or a non-injective edge and binding_error when the
// profile support leaves the edge.
edge_sampler bind_profile_to_edge(const cone& c, const relative_profile* profile);

struct demonstration_item
{
    std::size_t walk = 0;
    step edge_step;
    bool passed = true;
    std::vector<std::string> violated;

    friend bool operator==(const demonstration_item&, const demonstration_item&) = default;
};

struct demonstration_report
{
    step crux;
    std::uint64_t sample_size = 0;
    std::uint64_t failures = 0;
    std::uint64_t seed = 0;
    std::string provenance;
    std::vector<demonstration_item> items;
    // Present iff failures == 0.
    std::optional<double> indifference_upper_bound;
    // Present iff failures == 0 and an edge norm was supplied.
    std::optional<double> edge_norm_per_second;
    std::optional<double> indemnification_per_second;
    // n/N; diagnostic only, not an assurance statement.
    double failure_mle = 0.0;
    bool reliability_growth_needed = false;

    friend bool operator==(const demonstration_report&, const demonstration_report&) = default;
};

struct demonstration_options
{
    std::uint64_t sample_size = 1;
    std::uint64_t seed = 0;
    // Counting norm of the cone edge, events per second.
    std::optional<double> edge_norm_per_second;
    // System the tests execute against; the model itself when null.
    const automaton* implementation = nullptr;
};

// Outcome of a single test: replays it on the model (which must
// reproduce the walk exactly, else consistency_error), executes it on the
// implementation and judges the crux reached there.
demonstration_item execute_test(const automaton& model, const cone& c, std::size_t walk,
                                const std::vector<safety_constraint>& constraints,
                                const automaton* implementation = nullptr);

// Tally of a drawn multiset of walk indices.
std::vector<demonstration_item> evaluate_sample(const automaton& model, const cone& c,
                                                const std::vector<std::size_t>& walks,
                                                const std::vector<safety_constraint>& constraints,
                                                const automaton* implementation = nullptr);

demonstration_report run_demonstration(const automaton& model, const edge_sampler& sampler,
                                       const std::vector<safety_constraint>& constraints,
                                       const demonstration_options& options);

} // namespace safedemo
