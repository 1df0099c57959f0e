#pragma once

namespace nemasoh {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nemasoh
