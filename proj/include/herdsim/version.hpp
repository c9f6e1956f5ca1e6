#pragma once

namespace herdsim {

inline constexpr const char* kVersion = "0.1.0";

} // namespace herdsim
