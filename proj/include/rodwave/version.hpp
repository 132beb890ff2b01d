#pragma once

namespace rodwave {
inline constexpr const char* kVersion = "0.3.0";
}
