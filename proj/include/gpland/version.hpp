#pragma once

namespace gpland {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gpland
