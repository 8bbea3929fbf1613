#pragma once

namespace silver {

inline constexpr const char* kToolName = "silverscore";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace silver
