#pragma once

#include "safedemo/model_io.hpp"

#include <initializer_list>
#include <string>
#include <utility>

namespace testing_support {

inline safedemo::choice ch(std::initializer_list<std::pair<const std::string, safedemo::value>> values)
{
    return safedemo::choice{{values}};
}

inline std::string model_path(const std::string& name)
{
    return std::string(SAFEDEMO_SOURCE_DIR) + "/models/" + name;
}

inline std::string fixture_path(const std::string& name)
{
    return std::string(SAFEDEMO_SOURCE_DIR) + "/tests/fixtures/" + name;
}

inline const safedemo::model_document& gate()
{
    static const auto doc = safedemo::load_model(model_path("gate.model"));
    return doc;
}

} // namespace testing_support
