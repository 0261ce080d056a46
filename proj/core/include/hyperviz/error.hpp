#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperviz {

enum class ErrorCode {
  // catalog ingest
  EmptyInput,
  MalformedCsv,
  RaggedRow,
  DuplicateHeader,
  AllMissing,
  // mapping / scene
  UnknownColumn,
  KindMismatch,
  NonPositiveForLog,
  InvalidTransform,
  UnknownChannel,
  // scene file
  BadSceneFile,
  // links
  BadTemplate,
  UnknownPlaceholder,
  RowOutOfRange,
  // session protocol
  NotInRoom,
  Busy,
  NotNavigator,
  BadPayload,
  // map scoring
  IdMismatch,
  IdSetMismatch,
  Empty,
  // generic precondition failure
  InvalidArgument,
  Io,
};

/// Stable identifier used in CLI output and on the wire (e.g. "BUSY").
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, std::uint64_t row);

  ErrorCode code() const noexcept { return code_; }

  /// Zero-based data row the error refers to, when there is one.
  std::optional<std::uint64_t> row() const noexcept { return row_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> row_;
};

}  // namespace hyperviz
