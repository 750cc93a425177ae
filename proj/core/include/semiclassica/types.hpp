#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace semiclassica {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Bad or inconsistent user input (dimension mismatch, invalid config, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed to meet its contract (non-convergence,
// coverage deficit, resolution violation, ...).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace semiclassica
