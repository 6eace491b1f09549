#pragma once

namespace hypercorr {
inline constexpr const char* kVersion = "0.1.0";
}
