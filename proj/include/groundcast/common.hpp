#pragma once

#include <stdexcept>
#include <string>

namespace groundcast {

// Error codes shared across the library. Operations that can fail in an
// expected, recoverable way either return std::optional (projection behind
// the camera, ray missing the plane) or throw Error carrying one of these.
enum class Err {
  parse_error,
  index_out_of_range,
  empty_mask,
  degenerate,
  frame_mismatch,
  dim_mismatch,
  too_small,
  empty_gt,
  behind_camera,
  no_hit,
  bad_params,
  bad_config,
  io_error,
  schema_error,
};

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) { throw Error(code, msg); }

}  // namespace groundcast
