#pragma once

namespace mel {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "melab";

}  // namespace mel
