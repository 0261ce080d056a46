#include "hyperviz/session_codec.hpp"

#include "hyperviz/error.hpp"

namespace hyperviz::session {

using nlohmann::json;

namespace {

[[noreturn]] void bad_payload(const std::string& what) { throw Error(ErrorCode::BadPayload, what); }

template <std::size_t N>
std::array<double, N> number_array(const json& j, const char* field) {
  if (!j.is_array() || j.size() != N) {
    bad_payload(std::string(field) + " must be an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!j[i].is_number()) bad_payload(std::string(field) + " must contain numbers");
    out[i] = j[i].get<double>();
  }
  return out;
}

const json& require(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) bad_payload(std::string("missing field '") + field + "'");
  return j.at(field);
}

std::uint64_t require_uint(const json& j, const char* field) {
  const json& v = require(j, field);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    bad_payload(std::string(field) + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

json optional_user(const std::optional<UserId>& user) {
  return user ? json(*user) : json(nullptr);
}

}  // namespace

bool is_valid_utf8(std::string_view text) noexcept {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      if (i + k >= n) return false;
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    constexpr std::uint32_t kMinForLength[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLength[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += extra + 1;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Records

json to_json(const Viewpoint& v) {
  return {{"position", v.position}, {"orientation", v.orientation}, {"field_of_view", v.field_of_view}};
}

Viewpoint viewpoint_from_json(const json& j) {
  if (!j.is_object()) bad_payload("viewpoint must be an object");
  Viewpoint v;
  v.position = number_array<3>(require(j, "position"), "position");
  v.orientation = number_array<4>(require(j, "orientation"), "orientation");
  const json& fov = require(j, "field_of_view");
  if (!fov.is_number()) bad_payload("field_of_view must be a number");
  v.field_of_view = fov.get<double>();
  v.validate();
  return v;
}

json to_json(const Annotation& a) {
  return {{"row_id", a.row_id}, {"author", a.author}, {"text", a.text}, {"server_seq", a.server_seq}};
}

Annotation annotation_from_json(const json& j) {
  Annotation a;
  a.row_id = require_uint(j, "row_id");
  a.author = require(j, "author").get<std::string>();
  a.text = require(j, "text").get<std::string>();
  a.server_seq = require_uint(j, "server_seq");
  return a;
}

json to_json(const Snapshot& s) {
  json users = json::array();
  for (const auto& [id, vp] : s.users) users.push_back({{"user", id}, {"viewpoint", to_json(vp)}});
  json annotations = json::array();
  for (const auto& a : s.annotations) annotations.push_back(to_json(a));
  return {
      {"room_id", s.room_id},
      {"users", std::move(users)},
      {"mapping", mapping_to_json(s.mapping)},
      {"mapping_version", s.mapping_version},
      {"annotations", std::move(annotations)},
      {"broadcast_navigator", optional_user(s.broadcast_navigator)},
  };
}

Snapshot snapshot_from_json(const json& j) {
  Snapshot s;
  try {
    s.room_id = require(j, "room_id").get<std::string>();
    for (const auto& u : require(j, "users")) {
      s.users.emplace(require(u, "user").get<std::string>(), viewpoint_from_json(require(u, "viewpoint")));
    }
    s.mapping = mapping_from_json(require(j, "mapping"));
    s.mapping_version = require_uint(j, "mapping_version");
    s.mapping.set_version(s.mapping_version);
    for (const auto& a : require(j, "annotations")) s.annotations.push_back(annotation_from_json(a));
    const json& nav = require(j, "broadcast_navigator");
    if (!nav.is_null()) s.broadcast_navigator = nav.get<std::string>();
  } catch (const json::exception& e) {
    bad_payload(std::string("malformed snapshot: ") + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Envelopes

Envelope parse_envelope(std::string_view text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) bad_payload("message is not valid JSON");
  if (!j.is_object()) bad_payload("message must be a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) bad_payload("message needs a string 'type'");
  Envelope e;
  e.type = j["type"].get<std::string>();
  if (j.contains("seq")) {
    const json& seq = j["seq"];
    if (seq.is_number_unsigned() || (seq.is_number_integer() && seq.get<std::int64_t>() >= 0)) {
      e.seq = seq.get<std::uint64_t>();
    } else {
      bad_payload("'seq' must be a non-negative integer");
    }
  }
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) bad_payload("'payload' must be an object");
    e.payload = std::move(j["payload"]);
  }
  if (j.contains("mapping_version") && j["mapping_version"].is_number_unsigned()) {
    e.mapping_version = j["mapping_version"].get<std::uint64_t>();
  }
  return e;
}

std::string serialize_envelope(const Envelope& e) {
  json j = {{"type", e.type}, {"seq", e.seq}, {"payload", e.payload}};
  if (e.mapping_version) j["mapping_version"] = *e.mapping_version;
  return j.dump();
}

ClientMessage decode_client_message(const Envelope& e) {
  const json& p = e.payload;
  try {
    if (e.type == "join") {
      msg::Join m;
      if (p.contains("viewpoint") && !p["viewpoint"].is_null()) {
        m.viewpoint = viewpoint_from_json(p["viewpoint"]);
      }
      return m;
    }
    if (e.type == "leave") return msg::Leave{};
    if (e.type == "set_mapping") return msg::SetMapping{mapping_from_json(require(p, "mapping"))};
    if (e.type == "viewpoint") return msg::ViewpointUpdate{viewpoint_from_json(p)};
    if (e.type == "broadcast_start") return msg::BroadcastStart{};
    if (e.type == "broadcast_stop") return msg::BroadcastStop{};
    if (e.type == "annotate") {
      msg::Annotate m;
      m.row_id = require_uint(p, "row_id");
      const json& text = require(p, "text");
      if (!text.is_string()) bad_payload("text must be a string");
      m.text = text.get<std::string>();
      if (m.text.size() > kMaxAnnotationBytes) {
        bad_payload("annotation text exceeds " + std::to_string(kMaxAnnotationBytes) + " bytes");
      }
      if (!is_valid_utf8(m.text)) bad_payload("annotation text is not valid UTF-8");
      return m;
    }
    if (e.type == "pick_link") {
      msg::PickLink m;
      if (p.contains("row_id")) {
        m.row_id = require_uint(p, "row_id");
      } else if (p.contains("ray")) {
        const json& ray = p["ray"];
        try {
          m.ray = Ray(number_array<3>(require(ray, "origin"), "origin"),
                      number_array<3>(require(ray, "direction"), "direction"));
        } catch (const Error& err) {
          bad_payload(err.what());
        }
        if (p.contains("pick_radius")) {
          m.pick_radius = p["pick_radius"].get<double>();
          if (!(m.pick_radius > 0.0)) bad_payload("pick_radius must be positive");
        }
      } else {
        bad_payload("pick_link needs 'row_id' or 'ray'");
      }
      return m;
    }
  } catch (const json::exception& ex) {
    bad_payload(e.type + ": " + ex.what());
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::BadPayload) throw;
    bad_payload(e.type + ": " + ex.what());
  }
  bad_payload("unknown message type '" + e.type + "'");
}

Envelope encode_client_message(const ClientMessage& message, std::uint64_t seq) {
  Envelope e;
  e.seq = seq;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, msg::Join>) {
          e.type = "join";
          if (m.viewpoint) e.payload["viewpoint"] = to_json(*m.viewpoint);
        } else if constexpr (std::is_same_v<T, msg::Leave>) {
          e.type = "leave";
        } else if constexpr (std::is_same_v<T, msg::SetMapping>) {
          e.type = "set_mapping";
          e.payload["mapping"] = mapping_to_json(m.mapping);
        } else if constexpr (std::is_same_v<T, msg::ViewpointUpdate>) {
          e.type = "viewpoint";
          e.payload = to_json(m.viewpoint);
        } else if constexpr (std::is_same_v<T, msg::BroadcastStart>) {
          e.type = "broadcast_start";
        } else if constexpr (std::is_same_v<T, msg::BroadcastStop>) {
          e.type = "broadcast_stop";
        } else if constexpr (std::is_same_v<T, msg::Annotate>) {
          e.type = "annotate";
          e.payload = {{"row_id", m.row_id}, {"text", m.text}};
        } else if constexpr (std::is_same_v<T, msg::PickLink>) {
          e.type = "pick_link";
          if (m.row_id) {
            e.payload["row_id"] = *m.row_id;
          } else if (m.ray) {
            e.payload["ray"] = {{"origin", m.ray->origin()}, {"direction", m.ray->direction()}};
            e.payload["pick_radius"] = m.pick_radius;
          }
        }
      },
      message);
  return e;
}

}  // namespace hyperviz::session
