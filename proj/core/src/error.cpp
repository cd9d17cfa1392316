#include "coach/error.hpp"

namespace coach {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidEncoding: return "InvalidEncoding";
    case ErrorCode::kDegenerateCorpus: return "DegenerateCorpus";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kUnknownRelation: return "UnknownRelation";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kIndexError: return "IndexError";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kAnalysisUnavailable: return "AnalysisUnavailable";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error("line " + std::to_string(line) + ": " + message),
      code_(code),
      line_(line) {}

}  // namespace coach
