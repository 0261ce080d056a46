#include <nlohmann/json.hpp>

#include "hyperviz/error.hpp"
#include "hyperviz/mapping.hpp"

namespace hyperviz {

std::string_view to_string(VisualChannel channel) noexcept {
  switch (channel) {
    case VisualChannel::pos_x: return "pos_x";
    case VisualChannel::pos_y: return "pos_y";
    case VisualChannel::pos_z: return "pos_z";
    case VisualChannel::color: return "color";
    case VisualChannel::size: return "size";
    case VisualChannel::shape: return "shape";
    case VisualChannel::alpha: return "alpha";
    case VisualChannel::orientation: return "orientation";
  }
  return "?";
}

VisualChannel parse_channel(std::string_view name) {
  for (VisualChannel c : kAllChannels) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorCode::UnknownChannel, "unknown channel '" + std::string(name) + "'");
}

std::string_view to_string(TransformKind kind) noexcept {
  switch (kind) {
    case TransformKind::linear: return "linear";
    case TransformKind::log: return "log";
    case TransformKind::rank: return "rank";
  }
  return "?";
}

TransformKind parse_transform_kind(std::string_view name) {
  if (name == "linear") return TransformKind::linear;
  if (name == "log") return TransformKind::log;
  if (name == "rank") return TransformKind::rank;
  throw Error(ErrorCode::InvalidTransform, "unknown transform '" + std::string(name) + "'");
}

void ChannelTransform::validate() const {
  if (!(clip_lo >= 0.0 && clip_hi <= 100.0 && clip_lo < clip_hi)) {
    throw Error(ErrorCode::InvalidTransform,
                "clip percentiles must satisfy 0 <= clip_lo < clip_hi <= 100 (got " +
                    std::to_string(clip_lo) + ", " + std::to_string(clip_hi) + ")");
  }
}

void ChannelMapping::assign(VisualChannel c, std::string column, ChannelTransform transform) {
  transform.validate();
  slots_[static_cast<std::size_t>(c)] = ChannelAssignment{std::move(column), transform};
}

bool ChannelMapping::empty() const noexcept {
  for (const auto& s : slots_) {
    if (s) return false;
  }
  return true;
}

void ChannelMapping::validate(const Catalog& catalog) const {
  for (VisualChannel c : kAllChannels) {
    const auto& slot = (*this)[c];
    if (!slot) continue;
    const std::string channel(to_string(c));
    const Column* column = catalog.find(slot->column);
    if (!column) {
      throw Error(ErrorCode::UnknownColumn,
                  "channel " + channel + ": unknown column '" + slot->column + "'");
    }
    slot->transform.validate();
    if (!column->is_numeric()) {
      if (c != VisualChannel::shape) {
        throw Error(ErrorCode::KindMismatch, "channel " + channel + ": column '" +
                                                 slot->column + "' is categorical");
      }
      continue;
    }
    if (slot->transform.kind == TransformKind::log) {
      const auto values = column->numbers();
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] <= 0.0) {
          throw Error(ErrorCode::NonPositiveForLog,
                      "channel " + channel + ": column '" + slot->column +
                          "' has non-positive value at row " + std::to_string(i),
                      i);
        }
      }
    }
  }
}

ChannelMapping mapping_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::BadPayload, "mapping must be a JSON object");
  ChannelMapping mapping;
  for (const auto& [key, value] : j.items()) {
    const VisualChannel channel = parse_channel(key);
    if (value.is_null()) continue;
    if (value.is_string()) {
      mapping.assign(channel, value.get<std::string>());
      continue;
    }
    if (!value.is_object() || !value.contains("column") || !value["column"].is_string()) {
      throw Error(ErrorCode::BadPayload,
                  "channel " + key + ": expected a column name or {\"column\": ...}");
    }
    ChannelTransform t;
    try {
      if (value.contains("transform")) {
        t.kind = parse_transform_kind(value["transform"].get<std::string>());
      }
      if (value.contains("clip_lo")) t.clip_lo = value["clip_lo"].get<double>();
      if (value.contains("clip_hi")) t.clip_hi = value["clip_hi"].get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::BadPayload, "channel " + key + ": " + e.what());
    }
    mapping.assign(channel, value["column"].get<std::string>(), t);
  }
  return mapping;
}

nlohmann::json mapping_to_json(const ChannelMapping& mapping) {
  nlohmann::json j = nlohmann::json::object();
  for (VisualChannel c : kAllChannels) {
    const auto& slot = mapping[c];
    if (!slot) continue;
    j[std::string(to_string(c))] = {
        {"column", slot->column},
        {"transform", std::string(to_string(slot->transform.kind))},
        {"clip_lo", slot->transform.clip_lo},
        {"clip_hi", slot->transform.clip_hi},
    };
  }
  return j;
}

}  // namespace hyperviz
