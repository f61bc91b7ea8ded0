#pragma once

namespace maxterm {

inline constexpr const char* kVersion = "0.1.0";

} // namespace maxterm
