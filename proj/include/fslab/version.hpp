#pragma once

namespace fslab {

inline constexpr const char* version = "0.1.0";

}  // namespace fslab
