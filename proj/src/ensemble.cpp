#include "safedemo/ensemble.hpp"

#include "safedemo/error.hpp"

#include <algorithm>
#include <limits>

namespace safedemo {

std::string to_string(const value& v)
{
    if (const auto* i = std::get_if<std::int64_t>(&v))
        return std::to_string(*i);
    return std::get<std::string>(v);
}

ensemble::ensemble(std::map<std::string, domain> terms)
    : _terms{std::move(terms)}
{
    if (_terms.empty())
        throw domain_error("ensemble requires a non-empty index set");
    for (const auto& [index, dom] : _terms) {
        if (dom.empty())
            throw domain_error("ensemble domain of '" + index + "' is empty");
        std::set<value> seen;
        for (const auto& v : dom)
            if (!seen.insert(v).second)
                throw domain_error("ensemble domain of '" + index + "' repeats value " + to_string(v));
    }
}

const ensemble::domain& ensemble::at(const std::string& index) const
{
    const auto it = _terms.find(index);
    if (it == _terms.end())
        throw domain_error("unknown index '" + index + "'");
    return it->second;
}

bool ensemble::admits(const std::string& index, const value& v) const
{
    const auto it = _terms.find(index);
    return it != _terms.end() && std::find(it->second.begin(), it->second.end(), v) != it->second.end();
}

index_set ensemble::indices() const
{
    index_set out;
    for (const auto& [index, _] : _terms)
        out.insert(index);
    return out;
}

std::uint64_t ensemble::cardinality() const
{
    constexpr auto max = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t product = 1;
    for (const auto& [_, dom] : _terms) {
        if (product > max / dom.size())
            return max;
        product *= dom.size();
    }
    return product;
}

std::optional<ensemble> ensemble::restrict_to(const index_set& indices) const
{
    if (indices.empty())
        return std::nullopt;
    std::map<std::string, domain> sub;
    for (const auto& index : indices)
        sub.emplace(index, at(index));
    return ensemble{std::move(sub)};
}

index_set choice::domain() const
{
    index_set out;
    for (const auto& [index, _] : assignments)
        out.insert(index);
    return out;
}

const value& choice::at(const std::string& index) const
{
    const auto it = assignments.find(index);
    if (it == assignments.end())
        throw domain_error("choice has no index '" + index + "'");
    return it->second;
}

std::string to_string(const choice& c)
{
    std::string out = "{";
    bool first = true;
    for (const auto& [index, v] : c.assignments) {
        if (!first)
            out += ", ";
        first = false;
        out += index + "=" + to_string(v);
    }
    return out + "}";
}

bool ensemble_admits(const ensemble& e, const choice& c)
{
    if (c.assignments.size() != e.size())
        return false;
    return std::all_of(c.assignments.begin(), c.assignments.end(),
                       [&](const auto& kv) { return e.admits(kv.first, kv.second); });
}

choice restrict_choice(const choice& c, const index_set& indices)
{
    choice out;
    for (const auto& index : indices)
        out.assignments.emplace(index, c.at(index));
    return out;
}

choice dyadic_product(const choice& a, const choice& b)
{
    choice out = a;
    for (const auto& [index, v] : b.assignments)
        if (!out.assignments.emplace(index, v).second)
            throw disjointness_error("dyadic product of choices sharing index '" + index + "'");
    return out;
}

basis::basis(ensemble stimulus, ensemble persistent)
    : _stimulus{std::move(stimulus)}
    , _persistent{std::move(persistent)}
{
    for (const auto& [index, dom] : _persistent.terms()) {
        if (!_stimulus.contains(index))
            throw domain_error("persistent index '" + index + "' is not a stimulus index");
        if (_stimulus.at(index) != dom)
            throw domain_error("persistent domain of '" + index + "' differs from its stimulus domain");
    }
}

index_set basis_partition::volatile_indices() const
{
    return volatile_part ? volatile_part->indices() : index_set{};
}

basis_partition partition_basis(const basis& b)
{
    index_set rest;
    for (const auto& [index, _] : b.stimulus().terms())
        if (!b.persistent().contains(index))
            rest.insert(index);
    return {b.persistent(), b.stimulus().restrict_to(rest)};
}

std::vector<choice> enumerate_choice_space(const ensemble& e, std::uint64_t bound)
{
    const auto card = e.cardinality();
    if (card > bound)
        throw capacity_error("choice space too large to enumerate", card, bound);

    std::vector<const std::pair<const std::string, ensemble::domain>*> terms;
    for (const auto& term : e.terms())
        terms.push_back(&term);

    std::vector<choice> out;
    out.reserve(card);
    // Odometer over domain positions; the last index varies fastest.
    std::vector<std::size_t> digit(terms.size(), 0);
    for (std::uint64_t n = 0; n < card; ++n) {
        choice c;
        for (std::size_t i = 0; i < terms.size(); ++i)
            c.assignments.emplace(terms[i]->first, terms[i]->second[digit[i]]);
        out.push_back(std::move(c));
        for (std::size_t i = terms.size(); i-- > 0;) {
            if (++digit[i] < terms[i]->second.size())
                break;
            digit[i] = 0;
        }
    }
    return out;
}

} // namespace safedemo
