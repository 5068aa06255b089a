#pragma once

namespace ringlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ringlab
