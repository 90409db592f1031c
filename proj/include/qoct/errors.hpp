#pragma once

#include <stdexcept>
#include <string>

namespace qoct {

// Error taxonomy mirrored by the CLI exit codes: a ConfigError means the
// user's inputs could not be interpreted (exit 2), a PhysicsError means the
// inputs were well-formed but describe a situation the model rejects, such as
// a wavelength outside the supported index band (exit 3), and a
// DegenerateError means an extraction step has no unique answer (exit 4).

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class PhysicsError : public std::runtime_error {
 public:
  explicit PhysicsError(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateError : public std::runtime_error {
 public:
  explicit DegenerateError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPhysics = 3;
inline constexpr int kExitDegenerate = 4;

}  // namespace qoct
