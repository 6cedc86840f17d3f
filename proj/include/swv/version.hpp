#pragma once

namespace swv {

inline constexpr const char* version = "0.1.0";

} // namespace swv
