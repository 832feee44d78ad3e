// version.hpp — Tool version stamped into reports

#pragma once

namespace dicke {

inline constexpr const char* tool_version = "1.0.0";

} // namespace dicke
