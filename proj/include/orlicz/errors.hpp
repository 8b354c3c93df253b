#pragma once

#include <stdexcept>
#include <string>

namespace orlicz {

// Argument outside the mathematical domain of an operation (negative t, σ ≤ 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Point or set outside the admissible geometry (bounding box, ambient ball, ...).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mesh step too coarse for the requested features, or nothing left to mesh.
class RefinementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string path = {}, int line = 0, int column = 0)
      : std::runtime_error(what), path_(std::move(path)), line_(line), column_(column) {}

  const std::string& path() const noexcept { return path_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string path_;
  int line_;
  int column_;
};

}  // namespace orlicz
