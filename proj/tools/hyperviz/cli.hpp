#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hyperviz/catalog.hpp"

namespace hyperviz::cli {

/// Exit status for bad input data (parse errors, mapping errors, id mismatches).
inline constexpr int kExitDataError = 2;

/// One summary line per column: name, kind, present/missing counts and stats.
void cmd_ingest(const std::filesystem::path& file, const ParseOptions& options, std::ostream& out);

/// Builds the scene for a JSON mapping file and writes it as HVSC.
void cmd_scene(const std::filesystem::path& catalog, const std::filesystem::path& mapping,
               const std::filesystem::path& output, const ParseOptions& options, std::ostream& out);

/// MapScore JSON for two landmark CSVs.
void cmd_score(const std::filesystem::path& truth, const std::filesystem::path& drawn, bool align,
               std::ostream& out);

/// Whole command line. Returns the process exit status: 0 on success,
/// kExitDataError on data errors, 1 on usage or startup failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyperviz::cli
