#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace classdiff {

// Machine-readable failure codes. The CLI prints them as `ERROR <CODE>: <detail>`.
enum class ErrorCode {
  zero_count,
  no_positives,
  zero_vector,
  empty_lexicon,
  empty_term,
  parse_error,
  range_error,
  missing_factor,
  too_few_classes,
  shape_mismatch,
  one_class_only,
  zero_variance,
  length_mismatch,
  empty_input,
  invalid_config,
  bad_magic,
  truncated_file,
  non_finite_value,
  unknown_label,
  duplicate_id,
  invalid_argument,
  io_error,
  usage,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

// Non-fatal, machine-readable diagnostics carried alongside results and
// serialized into report files.
struct Warning {
  std::string code;
  std::string detail;

  bool operator==(const Warning&) const = default;
};

}  // namespace classdiff
