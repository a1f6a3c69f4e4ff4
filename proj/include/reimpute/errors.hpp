#pragma once

#include <stdexcept>
#include <string>

namespace reimpute {

/// Problems with input data: unreadable files, malformed cells, schema
/// violations. The CLI maps these to exit status 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

/// A well-formed request the engine declines to compute, e.g. exact
/// enumeration of an oversized support or with a stochastic imputer.
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fitting failed inside a re-imputation run.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace reimpute
