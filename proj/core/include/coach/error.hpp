#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coach {

enum class ErrorCode {
  kEmptyInput,
  kInvalidEncoding,
  kDegenerateCorpus,
  kFormatError,
  kUnknownRelation,
  kInvalidK,
  kIndexError,
  kNotFound,
  kAnalysisUnavailable,
  kInvalidArgument,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);

// Every recoverable failure in the library is reported with this exception.
// `line` is set for file-format errors, `field` for request validation.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, std::size_t line);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::size_t>& line() const noexcept { return line_; }
  const std::optional<std::string>& field() const noexcept { return field_; }

  Error& with_field(std::string field) {
    field_ = std::move(field);
    return *this;
  }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::optional<std::string> field_;
};

}  // namespace coach
