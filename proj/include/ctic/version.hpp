#pragma once

namespace ctic {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ctic
