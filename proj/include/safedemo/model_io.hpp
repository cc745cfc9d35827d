#pragma once

// Model documents (JSON with embedded expression strings) and the JSON
// forms of walks, cones, profiles and demonstration reports.

#include "safedemo/demonstration.hpp"
#include "safedemo/inference.hpp"
#include "safedemo/profile.hpp"

#include "json.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace safedemo {

using json = nlohmann::ordered_json;

struct crux_spec
{
    std::string name;
    std::string locus;
    // Frame guard selecting among the canonical steps at `locus`.
    std::optional<expression> filter;
    std::set<std::string> entry_loci;
};

struct model_document
{
    std::string name;
    std::shared_ptr<const automaton> model;
    usage_pattern pattern;
    std::vector<safety_constraint> constraints;
    std::vector<crux_spec> cruxes;
    std::optional<step> start;

    [[nodiscard]] const crux_spec& crux_named(const std::string& name) const;
    // The declared start, else the first canonical step of the first locus.
    [[nodiscard]] step start_step() const;
};

// Throws parse_error (with line and column) for malformed documents and
// validation_error for catalogs that break an automaton invariant.
model_document parse_model(std::string_view text, std::uint64_t bound = default_enumeration_bound);
model_document load_model(const std::filesystem::path& path, std::uint64_t bound = default_enumeration_bound);

// First canonical step, in (λ, ψ) order, at the crux locus whose frame
// satisfies the filter.
step resolve_crux(const automaton& a, const crux_spec& spec, std::uint64_t bound = default_enumeration_bound);

json to_json(const value& v);
value value_from_json(const json& j);
json to_json(const choice& c);
choice choice_from_json(const json& j);
json to_json(const step& s);
step step_from_json(const json& j);
json to_json(const walk& w);
walk walk_from_json(const json& j);
json to_json(const cone& c);
cone cone_from_json(const json& j);
json to_json(const relative_profile& p);
relative_profile profile_from_json(const json& j);
json to_json(const demonstration_report& r);
demonstration_report report_from_json(const json& j);

// Fixed-width rendering of a demonstration report.
std::string report_text(const demonstration_report& r);

} // namespace safedemo
