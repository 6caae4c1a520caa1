#pragma once

namespace dicke {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace dicke
