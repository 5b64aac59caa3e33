#pragma once

namespace eitline {

inline constexpr const char* version = "0.1.0";

}  // namespace eitline
