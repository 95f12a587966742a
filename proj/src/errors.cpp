#include "mk/errors.hpp"

namespace mk {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_probability: return "invalid_probability";
    case ErrorCode::parse: return "parse";
    case ErrorCode::unsorted_probability: return "unsorted_probability";
    case ErrorCode::zero_last_column: return "zero_last_column";
    case ErrorCode::zero_b: return "zero_b";
    case ErrorCode::basis_convention: return "basis_convention";
    case ErrorCode::hypergroup_precondition: return "hypergroup_precondition";
    case ErrorCode::reversibility_violation: return "reversibility_violation";
    case ErrorCode::margin_mismatch: return "margin_mismatch";
    case ErrorCode::symmetry_violation: return "symmetry_violation";
    case ErrorCode::invalid_character_data: return "invalid_character_data";
    case ErrorCode::index_out_of_range: return "index_out_of_range";
    case ErrorCode::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

}  // namespace mk
