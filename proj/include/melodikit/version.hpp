#pragma once

namespace melodikit {

inline constexpr const char *kVersion = "0.1.0";
inline constexpr const char *kToolName = "melodikit";

} // namespace melodikit
