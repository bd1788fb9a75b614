#pragma once

namespace sascor {

inline constexpr const char* kVersion = "0.1.0";

}
