#pragma once

// Finite ensembles, their choices, and the choice-space algebra the
// automaton is built on. Choice spaces are only materialized through
// enumerate_choice_space, which always takes an explicit bound.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace safedemo {

// A domain value: integer or symbol.
using value = std::variant<std::int64_t, std::string>;

std::string to_string(const value& v);

using index_set = std::set<std::string>;

inline constexpr std::uint64_t default_enumeration_bound = 1'000'000;

class ensemble
{
public:
    using domain = std::vector<value>;

    // Throws domain_error when the index set is empty, a domain is empty,
    // or a domain repeats a value. Domain order is preserved.
    explicit ensemble(std::map<std::string, domain> terms);

    [[nodiscard]] const std::map<std::string, domain>& terms() const { return _terms; }
    [[nodiscard]] const domain& at(const std::string& index) const;
    [[nodiscard]] bool contains(const std::string& index) const { return _terms.count(index) != 0; }
    [[nodiscard]] bool admits(const std::string& index, const value& v) const;
    [[nodiscard]] index_set indices() const;
    [[nodiscard]] std::size_t size() const { return _terms.size(); }

    // Product of domain sizes, saturating at UINT64_MAX.
    [[nodiscard]] std::uint64_t cardinality() const;

    // Sub-ensemble over `indices`; nullopt when `indices` is empty.
    [[nodiscard]] std::optional<ensemble> restrict_to(const index_set& indices) const;

    friend bool operator==(const ensemble&, const ensemble&) = default;

private:
    std::map<std::string, domain> _terms;
};

// One value per index. Relative to a generating ensemble, a choice is
// valid when its domain equals the ensemble's index set and every value
// lies in the corresponding domain; see ensemble_admits.
struct choice
{
    std::map<std::string, value> assignments;

    [[nodiscard]] bool empty() const { return assignments.empty(); }
    [[nodiscard]] index_set domain() const;
    [[nodiscard]] const value& at(const std::string& index) const;

    friend auto operator<=>(const choice&, const choice&) = default;
    friend bool operator==(const choice&, const choice&) = default;
};

std::string to_string(const choice& c);

bool ensemble_admits(const ensemble& e, const choice& c);

// Subchoice: the ordinary restriction of the mapping to `indices`.
choice restrict_choice(const choice& c, const index_set& indices);

// Union of two choices over disjoint index sets.
choice dyadic_product(const choice& a, const choice& b);

// Stimulus ensemble with its persistent sub-ensemble.
class basis
{
public:
    basis(ensemble stimulus, ensemble persistent);

    [[nodiscard]] const ensemble& stimulus() const { return _stimulus; }
    [[nodiscard]] const ensemble& persistent() const { return _persistent; }

private:
    ensemble _stimulus;
    ensemble _persistent;
};

struct basis_partition
{
    ensemble persistent;
    // Volatile remainder; absent when the basis has no event space.
    std::optional<ensemble> volatile_part;

    [[nodiscard]] bool has_event_space() const { return volatile_part.has_value(); }
    [[nodiscard]] index_set volatile_indices() const;
};

basis_partition partition_basis(const basis& b);

// Every choice of the ensemble, lexicographic by index name and then by
// domain order. Throws capacity_error when the space exceeds `bound`.
std::vector<choice> enumerate_choice_space(const ensemble& e, std::uint64_t bound = default_enumeration_bound);

} // namespace safedemo
