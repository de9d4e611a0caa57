#pragma once

#include <stdexcept>
#include <string>

namespace dgc {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct LinearSolverError : std::runtime_error {
  explicit LinearSolverError(const std::string& what) : std::runtime_error(what) {}
};

struct NonconvergenceError : std::runtime_error {
  explicit NonconvergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dgc
