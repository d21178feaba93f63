#pragma once

namespace imc {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace imc
