#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace goxlens {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input files. Maps to CLI exit code 2.
struct DataError : Error {
  using Error::Error;
};

struct SchemaError : DataError {
  using DataError::DataError;
};

struct AmbiguousTradeError : DataError {
  AmbiguousTradeError(std::string what, std::vector<std::string> ids)
      : DataError(std::move(what)), trade_ids(std::move(ids)) {}
  std::vector<std::string> trade_ids;
};

/// Numerical routines refusing their input. Maps to CLI exit code 3.
struct AnalysisError : Error {
  using Error::Error;
};

struct DegenerateInputError : AnalysisError {
  using AnalysisError::AnalysisError;
};

struct InsufficientDataError : AnalysisError {
  using AnalysisError::AnalysisError;
};

struct SingularMatrixError : AnalysisError {
  SingularMatrixError(std::string what, std::vector<std::size_t> cols)
      : AnalysisError(std::move(what)), collinear(std::move(cols)) {}
  std::vector<std::size_t> collinear;
};

struct UnstableModelError : AnalysisError {
  UnstableModelError(std::string what, double radius)
      : AnalysisError(std::move(what)), spectral_radius(radius) {}
  double spectral_radius;
};

struct DivergenceError : AnalysisError {
  DivergenceError(std::string what, std::vector<double> trace)
      : AnalysisError(std::move(what)), loss_trace(std::move(trace)) {}
  std::vector<double> loss_trace;
};

}  // namespace goxlens
