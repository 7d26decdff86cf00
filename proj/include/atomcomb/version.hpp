#pragma once

namespace atomcomb {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace atomcomb
