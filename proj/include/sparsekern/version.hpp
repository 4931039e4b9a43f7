#pragma once

namespace sparsekern {
inline constexpr const char* kVersion = "0.1.0";
}
