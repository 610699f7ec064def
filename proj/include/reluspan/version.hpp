#pragma once

namespace reluspan {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace reluspan
