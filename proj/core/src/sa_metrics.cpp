#include "hyperviz/sa_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include <nlohmann/json.hpp>

#include "hyperviz/catalog.hpp"
#include "hyperviz/csv.hpp"
#include "hyperviz/error.hpp"

namespace hyperviz::sa {

double normalize_bearing(double degrees) noexcept {
  double r = std::fmod(degrees, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;  // -tiny + 360 rounds up to 360
  return r;
}

double angle_difference(double a_deg, double b_deg) noexcept {
  const double d = std::fmod(std::abs(a_deg - b_deg), 360.0);
  return std::min(d, 360.0 - d);
}

Landmark::Landmark(std::string id, double bearing_deg, double range_m) : id_(std::move(id)) {
  if (!std::isfinite(bearing_deg)) {
    throw Error(ErrorCode::InvalidArgument, "landmark '" + id_ + "': bearing must be finite");
  }
  if (!(range_m > 0.0) || !std::isfinite(range_m)) {
    throw Error(ErrorCode::InvalidArgument, "landmark '" + id_ + "': range must be positive");
  }
  bearing_ = normalize_bearing(bearing_deg);
  range_ = range_m;
}

LandmarkSet::LandmarkSet(std::vector<Landmark> landmarks) : landmarks_(std::move(landmarks)) {
  std::set<std::string_view> seen;
  for (const auto& l : landmarks_) {
    if (!seen.insert(l.id()).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate landmark id '" + l.id() + "'");
    }
  }
}

const Landmark* LandmarkSet::find(std::string_view id) const {
  auto it = std::find_if(landmarks_.begin(), landmarks_.end(),
                         [&](const Landmark& l) { return l.id() == id; });
  return it == landmarks_.end() ? nullptr : &*it;
}

LandmarkSet LandmarkSet::rotated(double delta_deg) const {
  std::vector<Landmark> out;
  out.reserve(landmarks_.size());
  for (const auto& l : landmarks_) out.push_back(l.rotated(delta_deg));
  return LandmarkSet(std::move(out));
}

LandmarkError landmark_errors(const Landmark& truth, const Landmark& drawn) {
  if (truth.id() != drawn.id()) {
    throw Error(ErrorCode::IdMismatch,
                "landmark ids differ: '" + truth.id() + "' vs '" + drawn.id() + "'");
  }
  return {std::abs(truth.range() - drawn.range()), angle_difference(truth.bearing(), drawn.bearing())};
}

namespace {

// Pairs each truth landmark with its drawn counterpart, in truth order.
std::vector<std::pair<const Landmark*, const Landmark*>> pair_up(const LandmarkSet& truth,
                                                                  const LandmarkSet& drawn) {
  if (truth.empty() && drawn.empty()) throw Error(ErrorCode::Empty, "no landmarks to score");
  std::vector<std::string> missing, extra;
  std::vector<std::pair<const Landmark*, const Landmark*>> pairs;
  for (const auto& t : truth.landmarks()) {
    if (const Landmark* d = drawn.find(t.id())) {
      pairs.emplace_back(&t, d);
    } else {
      missing.push_back(t.id());
    }
  }
  for (const auto& d : drawn.landmarks()) {
    if (!truth.find(d.id())) extra.push_back(d.id());
  }
  if (!missing.empty() || !extra.empty()) {
    auto join = [](const std::vector<std::string>& ids) {
      std::string s;
      for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
      return s.empty() ? std::string("none") : s;
    };
    throw Error(ErrorCode::IdSetMismatch, "landmark id sets differ; missing from drawn: " +
                                              join(missing) + "; not in truth: " + join(extra));
  }
  return pairs;
}

double total_angle_error(const std::vector<std::pair<const Landmark*, const Landmark*>>& pairs,
                         double delta) {
  double total = 0.0;
  for (const auto& [t, d] : pairs) total += angle_difference(t->bearing(), d->bearing() + delta);
  return total;
}

}  // namespace

double best_rotation(const LandmarkSet& truth, const LandmarkSet& drawn) {
  const auto pairs = pair_up(truth, drawn);

  std::vector<double> candidates = {0.0};
  for (const auto& [t, d] : pairs) {
    const double exact = normalize_bearing(t->bearing() - d->bearing());
    candidates.push_back(exact);
    candidates.push_back(normalize_bearing(exact + 180.0));
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<double> cost(candidates.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    cost[i] = total_angle_error(pairs, candidates[i]);
    best = std::min(best, cost[i]);
  }
  // Candidates on a flat minimum differ only by rounding.
  const double tolerance = 1e-9 * static_cast<double>(pairs.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (cost[i] <= best + tolerance) return candidates[i];
  }
  return 0.0;
}

MapScore score_map(const LandmarkSet& truth, const LandmarkSet& drawn, bool align) {
  const auto pairs = pair_up(truth, drawn);
  const double delta = align ? best_rotation(truth, drawn) : 0.0;

  MapScore score;
  score.rotation_applied = delta > 180.0 ? delta - 360.0 : delta;
  for (const auto& [t, d] : pairs) {
    const LandmarkError e = landmark_errors(*t, delta == 0.0 ? *d : d->rotated(delta));
    score.per_landmark.emplace(t->id(), e);
    score.total_distance_error += e.distance_error;
    score.total_angle_error += e.angle_error;
  }
  return score;
}

LandmarkSet parse_landmarks_csv(std::string_view text) {
  csv::Reader reader(text);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw Error(ErrorCode::EmptyInput, "landmark file has no header");
  int id_col = -1, bearing_col = -1, range_col = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "id") id_col = static_cast<int>(i);
    if (fields[i] == "bearing_deg") bearing_col = static_cast<int>(i);
    if (fields[i] == "range_m") range_col = static_cast<int>(i);
  }
  if (id_col < 0 || bearing_col < 0 || range_col < 0) {
    throw Error(ErrorCode::InvalidArgument, "landmark header must contain id,bearing_deg,range_m");
  }
  const std::size_t width = fields.size();

  std::vector<Landmark> landmarks;
  std::uint64_t row = 0;
  while (reader.next(fields)) {
    if (fields.size() != width) {
      throw Error(ErrorCode::RaggedRow, "ragged landmark row " + std::to_string(row), row);
    }
    const auto bearing = parse_finite_decimal(fields[bearing_col]);
    const auto range = parse_finite_decimal(fields[range_col]);
    if (!bearing || !range) {
      throw Error(ErrorCode::InvalidArgument,
                  "landmark row " + std::to_string(row) + ": bearing and range must be numbers", row);
    }
    landmarks.emplace_back(fields[id_col], *bearing, *range);
    ++row;
  }
  return LandmarkSet(std::move(landmarks));
}

LandmarkSet load_landmarks_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_landmarks_csv(text);
}

nlohmann::json to_json(const MapScore& score) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [id, e] : score.per_landmark) {
    per[id] = {{"distance_error", e.distance_error}, {"angle_error", e.angle_error}};
  }
  return {
      {"per_landmark", std::move(per)},
      {"total_distance_error", score.total_distance_error},
      {"total_angle_error", score.total_angle_error},
      {"rotation_applied", score.rotation_applied},
  };
}

}  // namespace hyperviz::sa
