#pragma once

namespace ridepool {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ridepool
