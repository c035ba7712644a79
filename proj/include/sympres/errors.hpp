#pragma once

#include <stdexcept>
#include <string>

namespace sympres {

struct InfeasibleConstraints : std::runtime_error {
  explicit InfeasibleConstraints(const std::string& what) : std::runtime_error(what) {}
};

struct NonPositiveWeight : std::runtime_error {
  explicit NonPositiveWeight(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateMapping : std::runtime_error {
  explicit DegenerateMapping(const std::string& what) : std::runtime_error(what) {}
};

struct UnstableRun : std::runtime_error {
  explicit UnstableRun(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroReference : std::runtime_error {
  explicit ZeroReference(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sympres
