#pragma once

#include <stdexcept>
#include <string>

namespace tsmm {

struct SingularMatrix : std::runtime_error {
  explicit SingularMatrix(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotSymmetric : std::runtime_error {
  explicit NotSymmetric(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidDims : std::runtime_error {
  explicit InvalidDims(const std::string& msg) : std::runtime_error(msg) {}
};

struct IndefiniteScenario : std::runtime_error {
  explicit IndefiniteScenario(const std::string& msg) : std::runtime_error(msg) {}
};

struct MaxIterations : std::runtime_error {
  explicit MaxIterations(const std::string& msg) : std::runtime_error(msg) {}
};

struct SchemaMismatch : std::runtime_error {
  explicit SchemaMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidConfig : std::runtime_error {
  explicit InvalidConfig(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tsmm
