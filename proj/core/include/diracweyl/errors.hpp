#ifndef DIRACWEYL_ERRORS_HPP
#define DIRACWEYL_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace diracweyl {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched block sizes, sample shapes or grids.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity produced while propagating the system.
class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

/// Unscaled Gram matrix requested beyond the e^{2 eta b} overflow cap.
class OverflowCapExceeded : public Error {
 public:
  using Error::Error;
};

/// The Weyl point iteration did not settle within the b schedule.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, std::vector<double> increments)
      : Error(what), increments_(std::move(increments)) {}
  const std::vector<double>& increments() const { return increments_; }

 private:
  std::vector<double> increments_;
};

/// The zeta step is too coarse for the requested window.
class AliasingError : public Error {
 public:
  AliasingError(const std::string& what, double required_step)
      : Error(what), required_step_(required_step) {}
  double required_step() const { return required_step_; }

 private:
  double required_step_;
};

/// A length that is not an integer number of cells.
class OffGridError : public Error {
 public:
  using Error::Error;
};

/// Block Cholesky breakdown: the leading `cells` blocks are not positive definite.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, int failing_block)
      : Error(what), failing_block_(failing_block) {}
  int failing_block() const { return failing_block_; }

 private:
  int failing_block_;
};

/// An inverse-solver stage failed at a grid sample.
class StageFailure : public Error {
 public:
  StageFailure(std::string stage, std::size_t node, const std::string& detail)
      : Error(stage + " failed at sample " + std::to_string(node) + ": " + detail),
        stage_(std::move(stage)),
        node_(node) {}
  const std::string& stage() const { return stage_; }
  std::size_t node() const { return node_; }

 private:
  std::string stage_;
  std::size_t node_;
};

/// Malformed or unreadable input files.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace diracweyl

#endif  // DIRACWEYL_ERRORS_HPP
