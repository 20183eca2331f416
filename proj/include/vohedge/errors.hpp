#pragma once

#include <stdexcept>
#include <string>

namespace vohedge {

enum class ErrorCode {
  config = 1,
  domain_violation,
  quadrature_failure,
  tail_divergence,
  degenerate_model,
  no_solution,
  invalid_abscissa,
  insufficient_samples,
  io,
  invalid_argument,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::config, w) {}
};
struct DomainViolation : Error {
  explicit DomainViolation(const std::string& w)
      : Error(ErrorCode::domain_violation, w) {}
};
struct QuadratureFailure : Error {
  explicit QuadratureFailure(const std::string& w)
      : Error(ErrorCode::quadrature_failure, w) {}
};
struct TailDivergence : Error {
  explicit TailDivergence(const std::string& w)
      : Error(ErrorCode::tail_divergence, w) {}
};
struct DegenerateModel : Error {
  explicit DegenerateModel(const std::string& w)
      : Error(ErrorCode::degenerate_model, w) {}
};
struct NoSolution : Error {
  explicit NoSolution(const std::string& w) : Error(ErrorCode::no_solution, w) {}
};
struct InvalidAbscissa : Error {
  explicit InvalidAbscissa(const std::string& w)
      : Error(ErrorCode::invalid_abscissa, w) {}
};
struct InsufficientSamples : Error {
  explicit InsufficientSamples(const std::string& w)
      : Error(ErrorCode::insufficient_samples, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::io, w) {}
};
struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w)
      : Error(ErrorCode::invalid_argument, w) {}
};
struct InternalError : Error {
  explicit InternalError(const std::string& w) : Error(ErrorCode::internal, w) {}
};

}  // namespace vohedge
