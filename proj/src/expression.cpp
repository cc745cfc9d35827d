#include "safedemo/expression.hpp"

#include "safedemo/error.hpp"

#include <cctype>
#include <charconv>
#include <vector>

namespace safedemo {

namespace {

std::int64_t parse_integer(const std::string& text)
{
    std::int64_t v = 0;
    std::from_chars(text.data(), text.data() + text.size(), v);
    return v;
}

enum class op
{
    lit,
    var,
    neg,
    not_,
    add,
    sub,
    mul,
    eq,
    ne,
    lt,
    le,
    gt,
    ge,
    and_,
    or_,
};

} // namespace

struct expression::node
{
    op kind = op::lit;
    eval_result literal = std::int64_t{0};
    std::string name;
    std::shared_ptr<const node> lhs;
    std::shared_ptr<const node> rhs;
};

namespace {

using node_ptr = std::shared_ptr<const expression::node>;

enum class tok
{
    end,
    integer,
    symbol,
    ident,
    lparen,
    rparen,
    plus,
    minus,
    star,
    eq,
    ne,
    lt,
    le,
    gt,
    ge,
    and_,
    or_,
    not_,
    true_,
    false_,
};

struct token
{
    tok kind = tok::end;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

class lexer
{
public:
    explicit lexer(std::string_view src) : _src{src} {}

    std::vector<token> run()
    {
        std::vector<token> out;
        for (;;) {
            skip_space();
            token t;
            t.line = _line;
            t.column = _column;
            if (_pos >= _src.size()) {
                out.push_back(t);
                return out;
            }
            lex_one(t);
            out.push_back(std::move(t));
        }
    }

private:
    void advance(std::size_t bytes)
    {
        for (std::size_t i = 0; i < bytes && _pos < _src.size(); ++i, ++_pos) {
            const auto ch = static_cast<unsigned char>(_src[_pos]);
            if (ch == '\n') {
                ++_line;
                _column = 1;
            } else if ((ch & 0xC0) != 0x80) {
                ++_column;
            }
        }
    }

    bool starts(std::string_view s) const { return _src.substr(_pos, s.size()) == s; }

    void skip_space()
    {
        while (_pos < _src.size() && std::isspace(static_cast<unsigned char>(_src[_pos])))
            advance(1);
    }

    [[noreturn]] void fail(const std::string& what) const { throw parse_error(what, _line, _column); }

    void lex_one(token& t)
    {
        struct fixed
        {
            std::string_view text;
            tok kind;
        };
        // Longest spellings first.
        static constexpr fixed operators[] = {
            {"==", tok::eq}, {"!=", tok::ne}, {"<>", tok::ne}, {"<=", tok::le}, {">=", tok::ge},
            {"&&", tok::and_}, {"||", tok::or_}, {"\xE2\x89\xA0", tok::ne}, {"\xE2\x89\xA4", tok::le},
            {"\xE2\x89\xA5", tok::ge}, {"\xC3\x97", tok::star}, {"\xE2\x88\x92", tok::minus},
            {"=", tok::eq}, {"<", tok::lt}, {">", tok::gt}, {"+", tok::plus}, {"-", tok::minus},
            {"*", tok::star}, {"!", tok::not_}, {"(", tok::lparen}, {")", tok::rparen},
        };
        for (const auto& f : operators) {
            if (starts(f.text)) {
                t.kind = f.kind;
                t.text = std::string(f.text);
                advance(f.text.size());
                return;
            }
        }

        const auto ch = static_cast<unsigned char>(_src[_pos]);
        if (std::isdigit(ch)) {
            const auto begin = _pos;
            while (_pos < _src.size() && std::isdigit(static_cast<unsigned char>(_src[_pos])))
                advance(1);
            t.kind = tok::integer;
            t.text = std::string(_src.substr(begin, _pos - begin));
            std::int64_t parsed = 0;
            const auto [end, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), parsed);
            if (ec != std::errc{} || end != t.text.data() + t.text.size())
                throw parse_error("integer literal out of range", t.line, t.column);
            return;
        }
        if (ch == '\'') {
            advance(1);
            const auto begin = _pos;
            while (_pos < _src.size() && _src[_pos] != '\'')
                advance(1);
            if (_pos >= _src.size())
                throw parse_error("unterminated symbol literal", t.line, t.column);
            t.kind = tok::symbol;
            t.text = std::string(_src.substr(begin, _pos - begin));
            advance(1);
            if (t.text.empty())
                throw parse_error("empty symbol literal", t.line, t.column);
            return;
        }
        if (std::isalpha(ch) || ch == '_') {
            const auto begin = _pos;
            auto ident_tail = [&] {
                while (_pos < _src.size()
                       && (std::isalnum(static_cast<unsigned char>(_src[_pos])) || _src[_pos] == '_'))
                    advance(1);
            };
            ident_tail();
            if (_pos + 1 < _src.size() && _src[_pos] == '.'
                && (std::isalpha(static_cast<unsigned char>(_src[_pos + 1])) || _src[_pos + 1] == '_')) {
                advance(1);
                ident_tail();
            }
            t.text = std::string(_src.substr(begin, _pos - begin));
            if (t.text == "and")
                t.kind = tok::and_;
            else if (t.text == "or")
                t.kind = tok::or_;
            else if (t.text == "not")
                t.kind = tok::not_;
            else if (t.text == "true")
                t.kind = tok::true_;
            else if (t.text == "false")
                t.kind = tok::false_;
            else
                t.kind = tok::ident;
            return;
        }
        fail("unexpected character");
    }

    std::string_view _src;
    std::size_t _pos = 0;
    std::size_t _line = 1;
    std::size_t _column = 1;
};

class parser
{
public:
    explicit parser(std::vector<token> tokens) : _tokens{std::move(tokens)} {}

    node_ptr run()
    {
        auto root = parse_or();
        if (peek().kind != tok::end)
            fail("unexpected token '" + peek().text + "'");
        return root;
    }

private:
    const token& peek() const { return _tokens[_pos]; }
    const token& next() { return _tokens[_pos++]; }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw parse_error(what, peek().line, peek().column);
    }

    static node_ptr binary(op kind, node_ptr lhs, node_ptr rhs)
    {
        auto n = std::make_shared<expression::node>();
        n->kind = kind;
        n->lhs = std::move(lhs);
        n->rhs = std::move(rhs);
        return n;
    }

    static node_ptr unary(op kind, node_ptr operand)
    {
        auto n = std::make_shared<expression::node>();
        n->kind = kind;
        n->lhs = std::move(operand);
        return n;
    }

    node_ptr parse_or()
    {
        auto lhs = parse_and();
        while (peek().kind == tok::or_) {
            next();
            lhs = binary(op::or_, lhs, parse_and());
        }
        return lhs;
    }

    node_ptr parse_and()
    {
        auto lhs = parse_not();
        while (peek().kind == tok::and_) {
            next();
            lhs = binary(op::and_, lhs, parse_not());
        }
        return lhs;
    }

    node_ptr parse_not()
    {
        if (peek().kind == tok::not_) {
            next();
            return unary(op::not_, parse_not());
        }
        return parse_cmp();
    }

    node_ptr parse_cmp()
    {
        auto lhs = parse_sum();
        op kind;
        switch (peek().kind) {
        case tok::eq: kind = op::eq; break;
        case tok::ne: kind = op::ne; break;
        case tok::lt: kind = op::lt; break;
        case tok::le: kind = op::le; break;
        case tok::gt: kind = op::gt; break;
        case tok::ge: kind = op::ge; break;
        default: return lhs;
        }
        next();
        auto rhs = parse_sum();
        switch (peek().kind) {
        case tok::eq:
        case tok::ne:
        case tok::lt:
        case tok::le:
        case tok::gt:
        case tok::ge: fail("comparisons do not chain");
        default: break;
        }
        return binary(kind, lhs, rhs);
    }

    node_ptr parse_sum()
    {
        auto lhs = parse_prod();
        while (peek().kind == tok::plus || peek().kind == tok::minus) {
            const auto kind = next().kind == tok::plus ? op::add : op::sub;
            lhs = binary(kind, lhs, parse_prod());
        }
        return lhs;
    }

    node_ptr parse_prod()
    {
        auto lhs = parse_unary();
        while (peek().kind == tok::star) {
            next();
            lhs = binary(op::mul, lhs, parse_unary());
        }
        return lhs;
    }

    node_ptr parse_unary()
    {
        if (peek().kind == tok::minus) {
            next();
            return unary(op::neg, parse_unary());
        }
        return parse_atom();
    }

    node_ptr parse_atom()
    {
        auto n = std::make_shared<expression::node>();
        switch (peek().kind) {
        case tok::integer: n->literal = parse_integer(next().text); return n;
        case tok::symbol: n->literal = next().text; return n;
        case tok::true_: next(); n->literal = true; return n;
        case tok::false_: next(); n->literal = false; return n;
        case tok::ident:
            n->kind = op::var;
            n->name = next().text;
            return n;
        case tok::lparen: {
            next();
            auto inner = parse_or();
            if (peek().kind != tok::rparen)
                fail("expected ')'");
            next();
            return inner;
        }
        case tok::end: fail("unexpected end of expression");
        default: fail("unexpected token '" + peek().text + "'");
        }
    }

    std::vector<token> _tokens;
    std::size_t _pos = 0;
};

eval_result from_value(const value& v)
{
    if (const auto* i = std::get_if<std::int64_t>(&v))
        return *i;
    return std::get<std::string>(v);
}

const char* type_name(const eval_result& r)
{
    switch (r.index()) {
    case 0: return "integer";
    case 1: return "symbol";
    default: return "boolean";
    }
}

std::int64_t as_int(const eval_result& r, const char* what)
{
    if (const auto* i = std::get_if<std::int64_t>(&r))
        return *i;
    throw domain_error(std::string(what) + " expects integers, got " + type_name(r));
}

bool as_bool(const eval_result& r, const char* what)
{
    if (const auto* b = std::get_if<bool>(&r))
        return *b;
    throw domain_error(std::string(what) + " expects booleans, got " + type_name(r));
}

eval_result eval(const expression::node& n, const variable_lookup& lookup)
{
    switch (n.kind) {
    case op::lit: return n.literal;
    case op::var: {
        const value* v = lookup(n.name);
        if (v == nullptr)
            throw domain_error("unbound variable '" + n.name + "'");
        return from_value(*v);
    }
    case op::neg: {
        const auto x = as_int(eval(*n.lhs, lookup), "negation");
        std::int64_t r;
        if (__builtin_sub_overflow(std::int64_t{0}, x, &r))
            throw domain_error("integer overflow");
        return r;
    }
    case op::not_: return !as_bool(eval(*n.lhs, lookup), "not");
    case op::and_: return as_bool(eval(*n.lhs, lookup), "and") && as_bool(eval(*n.rhs, lookup), "and");
    case op::or_: return as_bool(eval(*n.lhs, lookup), "or") || as_bool(eval(*n.rhs, lookup), "or");
    case op::add:
    case op::sub:
    case op::mul: {
        const auto a = as_int(eval(*n.lhs, lookup), "arithmetic");
        const auto b = as_int(eval(*n.rhs, lookup), "arithmetic");
        std::int64_t r;
        bool overflow = n.kind == op::add   ? __builtin_add_overflow(a, b, &r)
                        : n.kind == op::sub ? __builtin_sub_overflow(a, b, &r)
                                            : __builtin_mul_overflow(a, b, &r);
        if (overflow)
            throw domain_error("integer overflow");
        return r;
    }
    case op::eq:
    case op::ne: {
        const auto a = eval(*n.lhs, lookup);
        const auto b = eval(*n.rhs, lookup);
        if (a.index() != b.index())
            throw domain_error(std::string("cannot compare ") + type_name(a) + " with " + type_name(b));
        return (a == b) == (n.kind == op::eq);
    }
    case op::lt:
    case op::le:
    case op::gt:
    case op::ge: {
        const auto a = eval(*n.lhs, lookup);
        const auto b = eval(*n.rhs, lookup);
        if (a.index() != b.index() || std::holds_alternative<bool>(a))
            throw domain_error(std::string("cannot order ") + type_name(a) + " with " + type_name(b));
        switch (n.kind) {
        case op::lt: return a < b;
        case op::le: return a <= b;
        case op::gt: return a > b;
        default: return a >= b;
        }
    }
    }
    throw domain_error("corrupt expression");
}

void collect(const expression::node& n, index_set& out)
{
    if (n.kind == op::var)
        out.insert(n.name);
    if (n.lhs)
        collect(*n.lhs, out);
    if (n.rhs)
        collect(*n.rhs, out);
}

} // namespace

std::string to_string(const eval_result& r)
{
    if (const auto* b = std::get_if<bool>(&r))
        return *b ? "true" : "false";
    if (const auto* i = std::get_if<std::int64_t>(&r))
        return std::to_string(*i);
    return std::get<std::string>(r);
}

expression::expression(std::string text, std::shared_ptr<const node> root)
    : _text{std::move(text)}
    , _root{std::move(root)}
{
}

expression expression::parse(std::string_view text)
{
    auto root = parser{lexer{text}.run()}.run();
    return expression{std::string(text), std::move(root)};
}

expression expression::always()
{
    return parse("true");
}

eval_result expression::evaluate(const variable_lookup& lookup) const
{
    return eval(*_root, lookup);
}

eval_result expression::evaluate(const choice& env) const
{
    return eval(*_root, [&](std::string_view name) -> const value* {
        const auto it = env.assignments.find(std::string(name));
        return it == env.assignments.end() ? nullptr : &it->second;
    });
}

bool expression::test(const choice& env) const
{
    return as_bool(evaluate(env), "guard");
}

bool expression::test(const variable_lookup& lookup) const
{
    return as_bool(evaluate(lookup), "guard");
}

value expression::compute(const choice& env) const
{
    const auto r = evaluate(env);
    if (const auto* i = std::get_if<std::int64_t>(&r))
        return *i;
    if (const auto* s = std::get_if<std::string>(&r))
        return *s;
    throw domain_error("expression '" + _text + "' yields a boolean where a domain value is required");
}

index_set expression::variables() const
{
    index_set out;
    collect(*_root, out);
    return out;
}

variable_lookup frame_lookup(const choice& abscissa, const choice& ordinate)
{
    return [&abscissa, &ordinate](std::string_view name) -> const value* {
        const choice* source = &abscissa;
        if (name.substr(0, 4) == "out.") {
            source = &ordinate;
            name.remove_prefix(4);
        }
        const auto it = source->assignments.find(std::string(name));
        return it == source->assignments.end() ? nullptr : &it->second;
    };
}

} // namespace safedemo
