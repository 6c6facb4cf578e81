#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wass1 {

enum class ErrorCode {
  parse,          // malformed input text
  dimension,      // non-square grid or side mismatch
  value,          // negative or non-integer mass, out-of-range pixel
  empty,          // zero total mass
  overflow,       // working integer width exceeded
  out_of_range,   // parameter outside its admissible range (L, N, caps)
  infeasible,     // supplies cannot be routed
  certificate,    // solver output failed the optimality check
  io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "parse error";
    case ErrorCode::dimension: return "dimension error";
    case ErrorCode::value: return "value error";
    case ErrorCode::empty: return "empty error";
    case ErrorCode::overflow: return "overflow error";
    case ErrorCode::out_of_range: return "range error";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::certificate: return "certificate failure";
    case ErrorCode::io: return "i/o error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wass1
