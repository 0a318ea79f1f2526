#pragma once

namespace chebnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace chebnet
