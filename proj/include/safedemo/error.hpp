#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace safedemo {

// Root of every error raised by the library. Callers that only need a
// message catch this; the CLI maps it to exit status 1.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A value or name lies outside the domain an operation is defined on.
class domain_error : public error
{
public:
    using error::error;
};

// Dyadic product of choices whose index sets overlap.
class disjointness_error : public error
{
public:
    using error::error;
};

// An enumeration would exceed its configured bound.
class capacity_error : public error
{
public:
    capacity_error(const std::string& what, unsigned long long cardinality, unsigned long long bound)
        : error(what + ": cardinality " + std::to_string(cardinality) + " exceeds bound " + std::to_string(bound))
        , _cardinality{cardinality}
        , _bound{bound}
    {
    }

    [[nodiscard]] unsigned long long cardinality() const { return _cardinality; }
    [[nodiscard]] unsigned long long bound() const { return _bound; }

private:
    unsigned long long _cardinality;
    unsigned long long _bound;
};

// A finite excitation trace ran out before the requested length.
class truncation_error : public error
{
public:
    explicit truncation_error(std::size_t index)
        : error("excitation trace exhausted at index " + std::to_string(index))
        , _index{index}
    {
    }

    [[nodiscard]] std::size_t index() const { return _index; }

private:
    std::size_t _index;
};

class insufficient_data_error : public error
{
public:
    using error::error;
};

class precondition_error : public error
{
public:
    using error::error;
};

class binding_error : public error
{
public:
    using error::error;
};

// Replay of a sampled test did not reproduce its source walk.
class consistency_error : public error
{
public:
    using error::error;
};

// Model document or expression text that does not parse.
class parse_error : public error
{
public:
    parse_error(const std::string& what, std::size_t line, std::size_t column)
        : error(std::to_string(line) + ":" + std::to_string(column) + ": " + what)
        , _line{line}
        , _column{column}
    {
    }

    [[nodiscard]] std::size_t line() const { return _line; }
    [[nodiscard]] std::size_t column() const { return _column; }

private:
    std::size_t _line;
    std::size_t _column;
};

// A structurally valid model that breaks a catalog invariant. `check`
// names the violated rule, e.g. "locator not total".
class validation_error : public error
{
public:
    validation_error(std::string check, const std::string& detail)
        : error(check + (detail.empty() ? "" : ": " + detail))
        , _check{std::move(check)}
    {
    }

    [[nodiscard]] const std::string& check() const { return _check; }

private:
    std::string _check;
};

} // namespace safedemo
