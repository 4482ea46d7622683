#pragma once

namespace crowddiff {
inline constexpr const char* kVersion = "0.1.0";
}
