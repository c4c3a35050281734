#pragma once

namespace eigenopt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace eigenopt
