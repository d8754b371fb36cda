#pragma once

namespace otd {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace otd
