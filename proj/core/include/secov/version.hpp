#pragma once

namespace secov {

inline constexpr const char* kVersion = "0.1.0";

}
