#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperviz/mapping.hpp"
#include "hyperviz/scene.hpp"

namespace hyperviz {

// HVSC layout, all integers and floats little-endian:
//
//   "HVSC"  u16 version  u64 count
//   positions   f32 x 3 x count (interleaved xyz)
//   colors      u8  x 4 x count (rgba)
//   sizes       f32 x count
//   shape_ids   u8  x count
//   orientation f32 x count
//   row_ids     u64 x count
//   u32 trailer length, then a UTF-8 JSON trailer
//
// The trailer carries the mapping (with its version), the catalog column
// names and excluded_rows.

inline constexpr std::uint16_t kHvscVersion = 1;
inline constexpr std::size_t kHvscHeaderBytes = 4 + 2 + 8;
inline constexpr std::size_t kHvscPointBytes = 12 + 4 + 4 + 1 + 4 + 8;

/// Exact file size for `count` points and a trailer of `trailer_bytes`.
constexpr std::uint64_t hvsc_file_size(std::uint64_t count, std::uint64_t trailer_bytes) {
  return kHvscHeaderBytes + count * kHvscPointBytes + 4 + trailer_bytes;
}

struct SceneFile {
  Scene scene;
  ChannelMapping mapping;
  std::vector<std::string> columns;
};

/// Serializes a scene. Output is deterministic for identical inputs.
std::string encode_hvsc(const Scene& scene, const ChannelMapping& mapping,
                        std::span<const std::string> columns);

/// Parses HVSC bytes. Throws Error(BadSceneFile) on a wrong magic or
/// version, truncation, trailing bytes or a malformed trailer.
SceneFile decode_hvsc(std::string_view bytes);

void write_hvsc_file(const std::filesystem::path& path, const Scene& scene,
                     const ChannelMapping& mapping, std::span<const std::string> columns);
SceneFile read_hvsc_file(const std::filesystem::path& path);

}  // namespace hyperviz
