#ifndef DROFA_ERRORS_HPP
#define DROFA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace drofa {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
};

struct NegativeEntry : Error {
  std::size_t index;
  explicit NegativeEntry(std::size_t i)
      : Error("negative entry at index " + std::to_string(i)), index(i) {}
};

struct SumOutOfTolerance : Error {
  double actual_sum;
  explicit SumOutOfTolerance(double s)
      : Error("simplex sum out of tolerance: " + std::to_string(s)),
        actual_sum(s) {}
};

struct EmptyVector : Error {
  EmptyVector() : Error("empty vector") {}
};

struct NonFiniteInput : Error {
  NonFiniteInput() : Error("non-finite input") {}
};

struct NonFiniteLoss : Error {
  NonFiniteLoss() : Error("non-finite loss value") {}
};

struct NonFiniteGradient : Error {
  NonFiniteGradient() : Error("non-finite gradient") {}
};

struct NonFiniteIterate : Error {
  long step;
  explicit NonFiniteIterate(long at)
      : Error("non-finite iterate at local step " + std::to_string(at) +
              " (step size too large?)"),
        step(at) {}
};

struct BadIndex : Error {
  explicit BadIndex(const std::string& what) : Error("bad index: " + what) {}
};

struct BadConfig : Error {
  explicit BadConfig(const std::string& what) : Error("bad config: " + what) {}
};

struct BoundaryKL : Error {
  BoundaryKL() : Error("KL regularizer evaluated at a zero entry") {}
};

struct SolverNoConvergence : Error {
  double residual;
  explicit SolverNoConvergence(double r)
      : Error("solver failed to converge, residual " + std::to_string(r)),
        residual(r) {}
};

struct WrongObjectiveKind : Error {
  explicit WrongObjectiveKind(const std::string& what)
      : Error("wrong objective kind: " + what) {}
};

struct GridTooCoarse : Error {
  GridTooCoarse() : Error("grid argmin on boundary; refine the grid") {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

struct ParseError : Error {
  long line;
  ParseError(long l, const std::string& what)
      : Error("parse error at line " + std::to_string(l) + ": " + what),
        line(l) {}
};

struct EmptyPartition : Error {
  explicit EmptyPartition(const std::string& label)
      : Error("empty partition for label " + label) {}
};

struct SchemaError : Error {
  std::string key;
  SchemaError(const std::string& k, const std::string& reason)
      : Error("config key '" + k + "': " + reason), key(k) {}
};

struct MisalignedConfigs : Error {
  explicit MisalignedConfigs(const std::string& what)
      : Error("misaligned configs: " + what) {}
};

struct DivergenceDetected : Error {
  long stage;
  long step;
  DivergenceDetected(long s, long k)
      : Error("divergence detected at stage " + std::to_string(s) +
              ", local step " + std::to_string(k)),
        stage(s), step(k) {}
};

}  // namespace drofa

#endif
