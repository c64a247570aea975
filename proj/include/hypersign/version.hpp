#pragma once

#include <string_view>

namespace hypersign {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace hypersign
