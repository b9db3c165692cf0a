#pragma once

#define I2E_VERSION_MAJOR 0
#define I2E_VERSION_MINOR 1
#define I2E_VERSION_PATCH 0

namespace i2e {
inline constexpr const char* kVersion = "0.1.0";
}  // namespace i2e
