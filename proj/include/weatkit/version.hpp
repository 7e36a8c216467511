#pragma once

namespace weatkit {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace weatkit
