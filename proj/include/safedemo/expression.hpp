#pragma once

// Guard and assignment expressions used throughout the model catalogs.
//
//   expr    := or
//   or      := and { ("or" | "||") and }
//   and     := not { ("and" | "&&") not }
//   not     := ("not" | "!") not | cmp
//   cmp     := sum [ ("=" | "==" | "!=" | "<>" | "≠" | "<" | "<=" | "≤" | ">" | ">=" | "≥") sum ]
//   sum     := prod { ("+" | "-") prod }
//   prod    := unary { ("*" | "×") unary }
//   unary   := ("-" | "−") unary | atom
//   atom    := integer | 'symbol' | true | false | name | "(" expr ")"
//   name    := ident [ "." ident ]
//
// Expressions have no side effects and no loops; evaluation is total
// whenever every referenced variable is bound and operand types agree.

#include "safedemo/ensemble.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace safedemo {

// Result of evaluating an expression: a domain value or a truth value.
using eval_result = std::variant<std::int64_t, std::string, bool>;

std::string to_string(const eval_result& r);

// Resolves a variable name to its bound value, or nullptr when unbound.
using variable_lookup = std::function<const value*(std::string_view)>;

class expression
{
public:
    struct node;

    // Throws parse_error with a 1-based line and column inside `text`.
    static expression parse(std::string_view text);

    // Literal true, used for unguarded rules.
    static expression always();

    [[nodiscard]] eval_result evaluate(const variable_lookup& lookup) const;

    // Evaluates against a single choice.
    [[nodiscard]] eval_result evaluate(const choice& env) const;

    // Throws domain_error when the result is not a truth value.
    [[nodiscard]] bool test(const choice& env) const;
    [[nodiscard]] bool test(const variable_lookup& lookup) const;

    // Throws domain_error when the result is a truth value.
    [[nodiscard]] value compute(const choice& env) const;

    [[nodiscard]] const std::string& text() const { return _text; }

    // Every variable name the expression references.
    [[nodiscard]] index_set variables() const;

private:
    expression(std::string text, std::shared_ptr<const node> root);

    std::string _text;
    std::shared_ptr<const node> _root;
};

// Binds Ψ names to the abscissa and `out.<name>` to the ordinate, the
// convention used by frame-level guards such as safety constraints.
variable_lookup frame_lookup(const choice& abscissa, const choice& ordinate);

} // namespace safedemo
