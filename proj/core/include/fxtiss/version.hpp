#pragma once

namespace fxtiss {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fxtiss
