#pragma once

// Orbits under a usage pattern, arrival counting, and the relative and
// absolute operational profiles estimated from them.

#include "safedemo/automaton.hpp"
#include "safedemo/inference.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace safedemo {

// Deterministic 64-bit generator (splitmix64). Chosen over the standard
// distributions so draws are identical across standard libraries.
class random_stream
{
public:
    explicit random_stream(std::uint64_t seed) : _state{seed} {}

    std::uint64_t next_u64();
    // Uniform on [0, 1).
    double next_unit();

private:
    std::uint64_t _state;
};

std::uint64_t mix64(std::uint64_t x);

// Seed for the run at `run_index`: mix64(seed ^ mix64(run_index)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t run_index);

// Categorical distribution over a finite list of outcomes.
template <typename T>
struct categorical
{
    std::vector<T> outcomes;
    std::vector<double> weights;
};

// Draws an index by inverse CDF over `weights` (which sum to 1).
std::size_t draw_index(random_stream& rng, const std::vector<double>& weights);

struct usage_pattern
{
    enum class kind
    {
        independent,
        trace,
    };

    kind mode = kind::independent;
    // Per volatile variable, a distribution over its domain values.
    std::map<std::string, categorical<value>> independent;
    std::vector<choice> trace;
    std::uint64_t seed = 0;

    // Throws domain_error when a distribution does not sum to 1 within
    // 1e-9, names a value outside the domain, or misses a volatile variable.
    void validate(const automaton& a) const;

    // Every volatile value equally likely.
    static usage_pattern uniform(const automaton& a, std::uint64_t seed);

    [[nodiscard]] usage_pattern with_seed(std::uint64_t s) const;
};

class pattern_source final : public excitation_source
{
public:
    pattern_source(const automaton& a, const usage_pattern& pattern);

    choice next(std::size_t index) override;

private:
    usage_pattern _pattern;
    random_stream _rng;
    std::size_t _trace_pos = 0;
};

// Reference set of steps. Every present component must match; an empty
// predicate matches all steps.
class step_predicate
{
public:
    step_predicate() = default;

    static step_predicate all();
    static step_predicate nothing();
    static step_predicate at_loci(std::set<std::string> loci);
    static step_predicate members(step_set steps, std::string label);

    [[nodiscard]] step_predicate with_functionalities(std::set<std::string> names) const;
    // Frame guard over Ψ names and `out.<name>` for the ordinate.
    [[nodiscard]] step_predicate with_guard(expression guard) const;

    [[nodiscard]] bool matches(const step& s) const;
    [[nodiscard]] std::string describe() const;

private:
    bool _empty = false;
    std::optional<std::set<std::string>> _loci;
    std::optional<std::set<std::string>> _functionalities;
    std::optional<expression> _guard;
    std::optional<step_set> _members;
    std::string _label;
};

struct profile_entry
{
    step z;
    double probability = 0.0;
    std::size_t count = 0;

    friend bool operator==(const profile_entry&, const profile_entry&) = default;
};

struct relative_profile
{
    std::string reference;
    // Sorted by step.
    std::vector<profile_entry> support;
    std::size_t total_matches = 0;
    std::size_t walk_length = 0;
    std::uint64_t seed = 0;

    [[nodiscard]] double probability(const step& s) const;
    [[nodiscard]] double total() const;

    friend bool operator==(const relative_profile&, const relative_profile&) = default;
};

struct norm_estimate
{
    double value = 0.0;
    double window_delta = 0.0;
    std::size_t steps_used = 0;
};

walk simulate_orbit(const automaton& a, const step& start, const usage_pattern& pattern, std::size_t length);

// N_Z(walk, k): matches among the first k steps.
std::size_t count_arrivals(const walk& w, const step_predicate& z, std::size_t k);

// Throws insufficient_data_error when nothing in the walk matches.
relative_profile estimate_relative_profile(const walk& w, const step_predicate& z, std::uint64_t seed = 0);

// Elapsed seconds over the first k steps.
double sync(const automaton& a, const walk& w, std::size_t k);

// P(Z) estimate N_Z/k over the whole walk.
double absolute_profile(const walk& w, const step_predicate& z);

// N_Z/sync at the final step, with the relative change against the value
// `window` steps earlier.
norm_estimate counting_norm(const automaton& a, const walk& w, const step_predicate& z, std::size_t window);

struct conjecture_report
{
    std::size_t runs = 0;
    std::size_t length = 0;
    std::vector<double> count_ratios;  // N_U / N_Z per run
    std::vector<double> time_ratios;   // N_Z / sync per run
    double count_ratio_deviation = 0.0;
    double time_ratio_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Max pairwise relative deviation: max |x_i - x_j| / max(|x_i|, |x_j|).
double max_pairwise_relative_deviation(const std::vector<double>& xs);

// Runs `runs` orbits whose seeds come from derive_seed(pattern.seed, r),
// or from `patterns[r]` when given (one pattern per run).
conjecture_report check_limit_conjectures(const automaton& a, const step& start, const usage_pattern& pattern,
                                          const step_predicate& z, const step_predicate& u, std::size_t runs,
                                          std::size_t length, double tolerance);
conjecture_report check_limit_conjectures(const automaton& a, const step& start,
                                          const std::vector<usage_pattern>& patterns, const step_predicate& z,
                                          const step_predicate& u, std::size_t length, double tolerance);

} // namespace safedemo
