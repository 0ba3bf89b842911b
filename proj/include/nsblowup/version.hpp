#pragma once

namespace nsblowup {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nsblowup
