#pragma once

namespace cpb {

inline constexpr const char* kVersion = "0.1.0";
// bumped whenever the fit artifact layout changes
inline constexpr int kFitFormatVersion = 1;

}  // namespace cpb
