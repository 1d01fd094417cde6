#pragma once

#include <string_view>

#include "authpi/text.hpp"

namespace test_support {

inline authpi::Process P(std::string_view text) { return authpi::parse_or_throw(text); }

inline authpi::Name N(std::string_view text) { return authpi::Name::global(text); }

}  // namespace test_support
