#pragma once

namespace wqpt {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wqpt
