#pragma once

namespace orlicz {
inline constexpr const char* kVersion = "0.1.0";
}
