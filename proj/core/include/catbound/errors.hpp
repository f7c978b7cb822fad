#pragma once

#include <stdexcept>
#include <string>

namespace catbound {

/// Invalid model data: negative rates, bad weight sequences, missing tail
/// rules, unsupported family for an operation.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested bound does not exist for the given inputs (divergent weighted
/// series, nonpositive contraction-rate mean, missing envelope).
class BoundUndefinedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ODE integration failure: step underflow or loss of nonnegativity.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thinning proposed an acceptance probability above one; the majorant is
/// wrong, which is a programming or model error rather than bad luck.
class MajorantViolationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace catbound
