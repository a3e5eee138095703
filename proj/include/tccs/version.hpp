#pragma once

namespace tccs {

inline constexpr const char* kVersion = "tccs 0.1.0";

}  // namespace tccs
