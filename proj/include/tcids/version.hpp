#pragma once

#include <string_view>

namespace tcids {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

}  // namespace tcids
