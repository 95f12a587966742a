#ifndef MK_ERRORS_HPP
#define MK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mk {

/// Failure categories surfaced by the library. The C API maps each one to a
/// stable status code, so new values go at the end.
enum class ErrorCode {
  capacity,
  dimension_mismatch,
  invalid_probability,
  parse,
  unsorted_probability,
  zero_last_column,
  zero_b,
  basis_convention,
  hypergroup_precondition,
  reversibility_violation,
  margin_mismatch,
  symmetry_violation,
  invalid_character_data,
  index_out_of_range,
  invalid_argument,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mk

#endif
