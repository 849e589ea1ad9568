#pragma once

namespace whitesync {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace whitesync
