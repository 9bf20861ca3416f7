#pragma once

namespace qrem {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qrem
