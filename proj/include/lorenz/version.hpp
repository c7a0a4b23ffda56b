#pragma once

namespace lorenz {

inline constexpr const char* kToolName = "lorenz";
inline constexpr const char* kVersion = "0.1.0";

} // namespace lorenz
