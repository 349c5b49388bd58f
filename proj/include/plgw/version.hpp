#pragma once

namespace plgw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace plgw
