#pragma once

namespace ctrap {

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace ctrap
