#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace tilt {

struct CheckError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tensor/op shape contract violations.
struct ShapeError : CheckError {
  using CheckError::CheckError;
};

// Bad user-facing data (datasets, configs, checkpoints).
struct ValidationError : CheckError {
  using CheckError::CheckError;
};

}  // namespace tilt

#define TILT_CHECK_IMPL(cond, msg, etype)  \
  do {                                     \
    if (!(cond)) {                         \
      std::ostringstream oss_;             \
      oss_ << msg;                         \
      throw etype(oss_.str());             \
    }                                      \
  } while (0)

#define TILT_CHECK(cond, msg) TILT_CHECK_IMPL(cond, msg, tilt::CheckError)
#define TILT_SHAPE_CHECK(cond, msg) TILT_CHECK_IMPL(cond, msg, tilt::ShapeError)
#define TILT_VALIDATE(cond, msg) TILT_CHECK_IMPL(cond, msg, tilt::ValidationError)
