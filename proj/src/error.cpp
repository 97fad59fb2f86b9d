#include "classdiff/error.hpp"

namespace classdiff {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::zero_count: return "ZERO_COUNT";
    case ErrorCode::no_positives: return "NO_POSITIVES";
    case ErrorCode::zero_vector: return "ZERO_VECTOR";
    case ErrorCode::empty_lexicon: return "EMPTY_LEXICON";
    case ErrorCode::empty_term: return "EMPTY_TERM";
    case ErrorCode::parse_error: return "PARSE_ERROR";
    case ErrorCode::range_error: return "RANGE_ERROR";
    case ErrorCode::missing_factor: return "MISSING_FACTOR";
    case ErrorCode::too_few_classes: return "TOO_FEW_CLASSES";
    case ErrorCode::shape_mismatch: return "SHAPE_MISMATCH";
    case ErrorCode::one_class_only: return "ONE_CLASS_ONLY";
    case ErrorCode::zero_variance: return "ZERO_VARIANCE";
    case ErrorCode::length_mismatch: return "LENGTH_MISMATCH";
    case ErrorCode::empty_input: return "EMPTY";
    case ErrorCode::invalid_config: return "INVALID_CONFIG";
    case ErrorCode::bad_magic: return "BAD_MAGIC";
    case ErrorCode::truncated_file: return "TRUNCATED_FILE";
    case ErrorCode::non_finite_value: return "NON_FINITE_VALUE";
    case ErrorCode::unknown_label: return "UNKNOWN_LABEL";
    case ErrorCode::duplicate_id: return "DUPLICATE_ID";
    case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
    case ErrorCode::io_error: return "IO_ERROR";
    case ErrorCode::usage: return "USAGE";
  }
  return "UNKNOWN";
}

}  // namespace classdiff
