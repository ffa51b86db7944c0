#pragma once

namespace pcd {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace pcd
