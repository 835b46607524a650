#pragma once

#include <stdexcept>
#include <string>

namespace ome {

// Error taxonomy mapped onto CLI exit codes: ConfigError -> 1,
// DataError -> 2, EstimatorError -> 3.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public DataError {
 public:
  explicit ValidationError(const std::string& msg) : DataError(msg) {}
};

class EstimatorError : public std::runtime_error {
 public:
  explicit EstimatorError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when an anchor pair cannot identify error parameters or when the
// identified parameters fall outside the valid region. Invalid parameters
// signal an anchor violation and are never silently clipped.
class IdentificationError : public EstimatorError {
 public:
  explicit IdentificationError(const std::string& msg) : EstimatorError(msg) {}
};

class TrainingError : public EstimatorError {
 public:
  explicit TrainingError(const std::string& msg) : EstimatorError(msg) {}
};

}  // namespace ome
