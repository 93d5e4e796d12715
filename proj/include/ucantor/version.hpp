#pragma once

namespace ucantor {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "ucantor";

}  // namespace ucantor
