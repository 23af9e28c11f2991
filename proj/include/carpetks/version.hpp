#pragma once

namespace carpetks {

inline constexpr const char* kVersion = "carpetks 0.1.0";

}  // namespace carpetks
