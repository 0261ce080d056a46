#include "hyperviz/scene_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "hyperviz/error.hpp"

namespace hyperviz {

namespace {

template <typename T>
T to_little(T v) noexcept {
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

class Writer {
 public:
  explicit Writer(std::size_t capacity) { out_.reserve(capacity); }

  template <typename T>
  void put(T v) {
    v = to_little(v);
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_bytes(std::string_view bytes) { out_.append(bytes); }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }
  std::string_view get_bytes(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) {
      throw Error(ErrorCode::BadSceneFile, "truncated scene file at byte " + std::to_string(pos_));
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_hvsc(const Scene& scene, const ChannelMapping& mapping,
                        std::span<const std::string> columns) {
  if (!scene.consistent()) {
    throw Error(ErrorCode::InvalidArgument, "scene attribute arrays differ in length");
  }
  nlohmann::json trailer = {
      {"mapping", mapping_to_json(mapping)},
      {"mapping_version", mapping.version()},
      {"columns", std::vector<std::string>(columns.begin(), columns.end())},
      {"excluded_rows", scene.excluded_rows},
  };
  const std::string trailer_text = trailer.dump();

  const std::uint64_t n = scene.count();
  Writer w(hvsc_file_size(n, trailer_text.size()));
  w.put_bytes("HVSC");
  w.put<std::uint16_t>(kHvscVersion);
  w.put<std::uint64_t>(n);
  for (const auto& p : scene.positions) {
    w.put(p[0]);
    w.put(p[1]);
    w.put(p[2]);
  }
  for (const auto& c : scene.colors) {
    for (std::uint8_t b : c) w.put(b);
  }
  for (float s : scene.sizes) w.put(s);
  for (std::uint8_t s : scene.shape_ids) w.put(s);
  for (float o : scene.orientations) w.put(o);
  for (std::uint64_t r : scene.row_ids) w.put(r);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(trailer_text.size()));
  w.put_bytes(trailer_text);
  return w.take();
}

SceneFile decode_hvsc(std::string_view bytes) {
  Reader r(bytes);
  if (r.get_bytes(4) != "HVSC") throw Error(ErrorCode::BadSceneFile, "bad magic, expected HVSC");
  const auto version = r.get<std::uint16_t>();
  if (version != kHvscVersion) {
    throw Error(ErrorCode::BadSceneFile, "unsupported HVSC version " + std::to_string(version));
  }
  const auto n = r.get<std::uint64_t>();
  if (n > r.remaining() / kHvscPointBytes) {
    throw Error(ErrorCode::BadSceneFile,
                "point count " + std::to_string(n) + " exceeds the file size");
  }

  SceneFile file;
  Scene& scene = file.scene;
  scene.resize(static_cast<std::size_t>(n));
  for (auto& p : scene.positions) {
    p[0] = r.get<float>();
    p[1] = r.get<float>();
    p[2] = r.get<float>();
  }
  for (auto& c : scene.colors) {
    for (auto& b : c) b = r.get<std::uint8_t>();
  }
  for (auto& s : scene.sizes) s = r.get<float>();
  for (auto& s : scene.shape_ids) s = r.get<std::uint8_t>();
  for (auto& o : scene.orientations) o = r.get<float>();
  for (auto& id : scene.row_ids) id = r.get<std::uint64_t>();

  const auto trailer_len = r.get<std::uint32_t>();
  const std::string_view trailer_text = r.get_bytes(trailer_len);
  if (r.remaining() != 0) {
    throw Error(ErrorCode::BadSceneFile,
                std::to_string(r.remaining()) + " unexpected bytes after the trailer");
  }
  try {
    const auto trailer = nlohmann::json::parse(trailer_text);
    file.mapping = mapping_from_json(trailer.at("mapping"));
    file.mapping.set_version(trailer.at("mapping_version").get<std::uint64_t>());
    file.columns = trailer.at("columns").get<std::vector<std::string>>();
    scene.excluded_rows = trailer.at("excluded_rows").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadSceneFile, std::string("malformed trailer: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::BadSceneFile, std::string("malformed trailer mapping: ") + e.what());
  }
  return file;
}

void write_hvsc_file(const std::filesystem::path& path, const Scene& scene,
                     const ChannelMapping& mapping, std::span<const std::string> columns) {
  const std::string bytes = encode_hvsc(scene, mapping, columns);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

SceneFile read_hvsc_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode_hvsc(bytes);
}

}  // namespace hyperviz
