#pragma once

namespace panelecon {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace panelecon
