#pragma once

namespace nestlie {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "nestlie";

}  // namespace nestlie
