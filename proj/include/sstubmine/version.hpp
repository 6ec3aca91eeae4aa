#pragma once

#include <string_view>

namespace sstubmine {

inline constexpr std::string_view kToolName = "sstubminer";
inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace sstubmine
