#pragma once

namespace ppics {
inline constexpr const char* kVersion = "0.1.0";
}
