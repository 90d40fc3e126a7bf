#pragma once

namespace cleft {

inline constexpr const char* kToolName = "cleft";
inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchema = 1;
inline constexpr int kSpecFormatVersion = 1;

} // namespace cleft
