#include "hyperviz/error.hpp"

namespace hyperviz {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::DuplicateHeader: return "DuplicateHeader";
    case ErrorCode::AllMissing: return "AllMissing";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::NonPositiveForLog: return "NonPositiveForLog";
    case ErrorCode::InvalidTransform: return "InvalidTransform";
    case ErrorCode::UnknownChannel: return "UnknownChannel";
    case ErrorCode::BadSceneFile: return "BadSceneFile";
    case ErrorCode::BadTemplate: return "BadTemplate";
    case ErrorCode::UnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorCode::RowOutOfRange: return "RowOutOfRange";
    case ErrorCode::NotInRoom: return "NotInRoom";
    case ErrorCode::Busy: return "BUSY";
    case ErrorCode::NotNavigator: return "NotNavigator";
    case ErrorCode::BadPayload: return "BadPayload";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::IdSetMismatch: return "IdSetMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, std::uint64_t row)
    : std::runtime_error(message), code_(code), row_(row) {}

}  // namespace hyperviz
