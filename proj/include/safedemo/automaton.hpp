#pragma once

// The actuated automaton: functionalities, actuators, loci, the locator
// and the jump function, together with the iterative transform it
// induces on step space.

#include "safedemo/ensemble.hpp"
#include "safedemo/expression.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace safedemo {

// Starting condition over Ψ and ending condition over Φ.
struct frame
{
    choice abscissa;
    choice ordinate;

    friend auto operator<=>(const frame&, const frame&) = default;
    friend bool operator==(const frame&, const frame&) = default;
};

// One arm of a guarded assignment or selection. A missing guard is the
// unconditional fallback.
struct guarded_value
{
    expression guard;
    expression result;
};

struct guarded_name
{
    expression guard;
    std::string target;
};

// Assignment for one persistent variable: the first case whose guard
// holds wins, else the fallback expression.
struct assignment
{
    std::vector<guarded_value> cases;
    expression fallback;

    [[nodiscard]] value evaluate(const choice& stimulus) const;
};

class functionality
{
public:
    functionality(std::string name, std::map<std::string, assignment> assignments, double duration_seconds);

    [[nodiscard]] const std::string& name() const { return _name; }
    [[nodiscard]] const std::map<std::string, assignment>& assignments() const { return _assignments; }
    [[nodiscard]] double duration() const { return _duration; }

    // Raw evaluation, without range checks against Φ.
    [[nodiscard]] choice evaluate(const choice& stimulus) const;

private:
    std::string _name;
    std::map<std::string, assignment> _assignments;
    double _duration;
};

// Ordered guard list with a mandatory fallback, so selection is total.
class selector
{
public:
    selector(std::string name, std::vector<guarded_name> rules, std::string fallback);

    [[nodiscard]] const std::string& name() const { return _name; }
    [[nodiscard]] const std::vector<guarded_name>& rules() const { return _rules; }
    [[nodiscard]] const std::string& fallback() const { return _fallback; }

    [[nodiscard]] const std::string& select(const choice& stimulus) const;

private:
    std::string _name;
    std::vector<guarded_name> _rules;
    std::string _fallback;
};

// Maps stimuli to functionality names.
using actuator = selector;

// Per-locus jump rules; the selector name is the source locus.
using jump_rule = selector;

// (locus, functionality, frame). Ordered by locus, then abscissa, then
// functionality and ordinate, which is the canonical (λ, ψ) order.
struct step
{
    std::string locus;
    std::string functionality;
    frame fr;

    friend std::strong_ordering operator<=>(const step& a, const step& b);
    friend bool operator==(const step&, const step&) = default;
};

std::string to_string(const step& s);

struct walk
{
    std::vector<step> steps;
    // excitations[i] is the volatile choice that produced steps[i + 1].
    std::vector<choice> excitations;

    friend bool operator==(const walk&, const walk&) = default;
};

// Single-consumer stream of volatile choices.
class excitation_source
{
public:
    virtual ~excitation_source() = default;

    // `index` is the position of the excitation within the walk being built.
    virtual choice next(std::size_t index) = 0;
};

class trace_source final : public excitation_source
{
public:
    explicit trace_source(std::vector<choice> trace) : _trace{std::move(trace)} {}

    choice next(std::size_t index) override;

private:
    std::vector<choice> _trace;
    std::size_t _pos = 0;
};

class automaton
{
public:
    struct catalogs
    {
        std::vector<functionality> functionalities;
        std::vector<actuator> actuators;
        std::vector<std::string> loci;
        std::map<std::string, std::string> locator;
        std::vector<jump_rule> jumps;
    };

    // Validates cross-references, totality, locator surjectivity and, when
    // |∏Ψ| ≤ check_bound, exhaustively range-checks every functionality and
    // type-checks every guard. Throws validation_error naming the check.
    automaton(basis b, catalogs c, std::uint64_t check_bound = default_enumeration_bound);

    [[nodiscard]] const basis& stimulus_basis() const { return _basis; }
    [[nodiscard]] const basis_partition& partition() const { return _partition; }
    [[nodiscard]] const index_set& persistent_indices() const { return _persistent; }
    [[nodiscard]] const index_set& volatile_indices() const { return _volatile; }
    [[nodiscard]] const std::vector<std::string>& loci() const { return _loci; }
    [[nodiscard]] bool has_locus(const std::string& locus) const;
    [[nodiscard]] std::size_t functionality_count() const { return _functionalities.size(); }
    [[nodiscard]] const std::map<std::string, functionality>& functionalities() const { return _functionalities; }
    [[nodiscard]] const std::map<std::string, actuator>& actuators() const { return _actuators; }
    [[nodiscard]] const std::map<std::string, std::string>& locator() const { return _locator; }
    [[nodiscard]] const std::map<std::string, jump_rule>& jumps() const { return _jumps; }

    [[nodiscard]] const functionality& functionality_named(const std::string& name) const;

    // ℓ(λ)(ψ)
    [[nodiscard]] const std::string& select(const std::string& locus, const choice& stimulus) const;
    // Δ(λ, ψ)
    [[nodiscard]] const std::string& jump(const std::string& locus, const choice& stimulus) const;
    // f(ψ), range-checked against Φ.
    [[nodiscard]] choice apply(const std::string& functionality, const choice& stimulus) const;

    [[nodiscard]] bool is_consistent(const step& s) const;

    // True when s is (λ, ℓ(λ)(ψ), (ψ, f(ψ))) for its own λ and ψ.
    [[nodiscard]] bool is_canonical(const step& s) const;

    // Throws domain_error unless s lies in step space.
    void require_step(const step& s) const;

    [[nodiscard]] double duration(const std::string& functionality) const;

private:
    safedemo::basis _basis;
    basis_partition _partition;
    index_set _persistent;
    index_set _volatile;
    std::vector<std::string> _loci;
    std::map<std::string, functionality> _functionalities;
    std::map<std::string, actuator> _actuators;
    std::map<std::string, std::string> _locator;
    std::map<std::string, jump_rule> _jumps;
};

step make_consistent_step(const automaton& a, const std::string& locus, const choice& stimulus);

// The iterative transform for one volatile excitation.
step transit(const automaton& a, const step& s, const choice& next_excitation);

// Walk of `length` steps starting at `start`.
walk run_walk(const automaton& a, const step& start, excitation_source& excitations, std::size_t length);

std::vector<std::string> path_projection(const walk& w);
std::vector<frame> process_projection(const walk& w);
std::vector<std::string> procedure_projection(const walk& w);

// Response of `earlier` reappears as the persistent part of `later`'s stimulus.
bool conjoint(const automaton& a, const frame& earlier, const frame& later);

bool successively_conjoint(const automaton& a, std::span<const frame> process);

// Every frame belongs to the functionality executed at the same index.
bool procedure_covers(const automaton& a, std::span<const std::string> procedure, std::span<const frame> process);

struct pigeonhole_report
{
    bool witnessed = false;
    std::size_t max_homogeneous_count = 0;
    std::optional<choice> witness;
};

// Finite-prefix under-pigeonhole test: the largest number of distinct
// ordinates sharing one abscissa, compared against the catalog size.
pigeonhole_report check_under_pigeonhole(std::size_t catalog_size, std::span<const frame> prefix);

} // namespace safedemo
