#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netstation {

/// Base class for domain failures (unknown ids, malformed documents, ...).
class NetstationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The instance document does not follow the schema; `path` locates the field.
class SchemaError : public NetstationError {
 public:
  SchemaError(std::string path, const std::string& what)
      : NetstationError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class BackendError : public NetstationError {
 public:
  using NetstationError::NetstationError;
};

/// Initial solution creation found no feasible mode for some step. This is not
/// a proof of infeasibility.
class AbortWithoutSolution : public NetstationError {
 public:
  AbortWithoutSolution(int step, const std::string& what)
      : NetstationError(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

/// A rolling-horizon window stayed without solution after the retry.
class SmoothingError : public NetstationError {
 public:
  SmoothingError(std::size_t windowStart, const std::string& what)
      : NetstationError(what), windowStart_(windowStart) {}
  std::size_t windowStart() const { return windowStart_; }

 private:
  std::size_t windowStart_;
};

}  // namespace netstation
