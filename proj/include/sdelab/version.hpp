#pragma once

namespace sdelab {

inline constexpr const char* kToolName = "sdelab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace sdelab
