#pragma once

// Backward inference: the iterative converse, predecessor generations,
// cones of localized predecessor walks and their conversion to tests.

#include "safedemo/automaton.hpp"

#include <optional>
#include <set>
#include <span>
#include <vector>

namespace safedemo {

using step_set = std::set<step>;

// A finite backward walk. steps[k] holds the step at index -k, so
// steps.front() is the crux and steps.back() the edge step.
struct predecessor_walk
{
    std::vector<step> steps;

    [[nodiscard]] std::size_t size() const { return steps.size(); }
    [[nodiscard]] const step& crux() const { return steps.front(); }
    [[nodiscard]] const step& edge_step() const { return steps.back(); }
    // Signed indexing: at(0) is the crux, at(-(size()-1)) the edge step.
    [[nodiscard]] const step& at(long index) const;

    friend auto operator<=>(const predecessor_walk&, const predecessor_walk&) = default;
    friend bool operator==(const predecessor_walk&, const predecessor_walk&) = default;
};

struct stopping_rule
{
    std::size_t max_depth = 1;
    // Walks end on reaching any of these loci (crux excluded).
    std::set<std::string> entry_loci;

    friend bool operator==(const stopping_rule&, const stopping_rule&) = default;
};

struct cone
{
    step crux;
    std::vector<predecessor_walk> walks;
    stopping_rule stopping;
    bool acyclic = true;

    friend bool operator==(const cone&, const cone&) = default;
};

// Precomputes every canonical step (λ, ℓ(λ)(ψ), (ψ, f(ψ))) once and answers
// converse queries by lookup. Throws capacity_error when |Λ|·|∏Ψ| > bound.
class converse_solver
{
public:
    converse_solver(const automaton& a, std::uint64_t bound = default_enumeration_bound);

    [[nodiscard]] step_set converse(const step& target) const;
    [[nodiscard]] const automaton& model() const { return _automaton; }

    // All canonical steps in canonical (λ, ψ) order.
    [[nodiscard]] const std::vector<step>& canonical_steps() const { return _canonical; }

private:
    const automaton& _automaton;
    std::vector<step> _canonical;
    std::map<std::pair<std::string, choice>, std::vector<std::size_t>> _by_successor;
};

step_set converse(const automaton& a, const step& target, std::uint64_t bound = default_enumeration_bound);

// G(0) = {crux}; G(n+1) = union of converses over G(n).
std::vector<step_set> predecessor_generations(const automaton& a, const step& crux, std::size_t depth,
                                              std::uint64_t bound = default_enumeration_bound);

cone build_cone(const automaton& a, const step& crux, const stopping_rule& stopping,
                std::uint64_t bound = default_enumeration_bound);
cone build_cone(const converse_solver& solver, const step& crux, const stopping_rule& stopping);

struct completeness_report
{
    bool complete = true;
    // An unwitnessed obligation: a walk holding the node, its index and
    // the converse step no member reaches from there.
    struct missing
    {
        std::size_t walk = 0;
        long index = 0;
        step predecessor;
    };
    std::optional<missing> counterexample;

    explicit operator bool() const { return complete; }
};

// For every walk w, every index i from 0 down to -(|w|-2) and every s in
// the converse of w_i, some member e agrees with w on indices 0..i and
// has e_{i-1} = s.
completeness_report check_complete(const converse_solver& solver, std::span<const predecessor_walk> walks);
completeness_report check_complete(const automaton& a, std::span<const predecessor_walk> walks,
                                   std::uint64_t bound = default_enumeration_bound);

// Weaker form that asks only e_i = w_i and e_{i-1} = s, without a shared
// prefix. Walks whose branches converge on a common step can witness each
// other, so removing one member need not break it.
completeness_report check_pointwise_complete(const converse_solver& solver, std::span<const predecessor_walk> walks);
completeness_report check_pointwise_complete(const automaton& a, std::span<const predecessor_walk> walks,
                                             std::uint64_t bound = default_enumeration_bound);

// False iff some member is a crux-side prefix of another member.
bool check_independent(std::span<const predecessor_walk> walks);

// No locus repeats along the walk's path projection.
bool walk_acyclic(const predecessor_walk& w);

step_set edge(const cone& c);

// Edge step of each member walk, in member order.
std::vector<step> edge_steps(const cone& c);

// Edge-step extraction is injective over the member walks.
bool edge_bijective(const cone& c);

// Forward form of a predecessor walk: steps[0] is the edge step and
// steps.back() the crux. Volatile components travel inside each step's
// abscissa.
struct forward_test
{
    std::vector<step> steps;
    std::size_t source = 0;

    friend bool operator==(const forward_test&, const forward_test&) = default;
};

forward_test to_test(const predecessor_walk& w, std::size_t source = 0);
predecessor_walk from_test(const forward_test& t);

// The volatile choices that drive the test forward, one per transition.
std::vector<choice> test_excitations(const automaton& a, const forward_test& t);

// Executes the test on `a` from its first step with its recorded excitations.
walk replay(const automaton& a, const forward_test& t);

} // namespace safedemo
