#include "tensorclust/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace tensorclust {

void PartitionScheme::validate() const {
  if (n_angle < 1 || n_dist < 2 || n_quarter < 1) {
    throw std::invalid_argument("PartitionScheme: bin counts invalid");
  }
  if (!(radius > 0.0)) throw std::invalid_argument("PartitionScheme: radius must be positive");
  if (!(court_width > 0.0) || !(court_height > 0.0)) {
    throw std::invalid_argument("PartitionScheme: court bounds must be positive");
  }
  if (basket_x < 0.0 || basket_x > court_width || basket_y < 0.0 || basket_y > court_height) {
    throw std::invalid_argument("PartitionScheme: basket must sit inside the court");
  }
}

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::ParseError:
      return "parse_error";
    case RejectReason::OutOfBounds:
      return "out_of_bounds";
    case RejectReason::NegativeAngle:
      return "negative_angle";
    case RejectReason::Overtime:
      return "overtime";
    case RejectReason::BelowMinAttempts:
      return "player_below_min_attempts";
  }
  return "unknown";
}

BinResult polar_bin(double x, double y, const PartitionScheme& scheme) {
  scheme.validate();
  BinResult out;
  if (!std::isfinite(x) || !std::isfinite(y) || x < 0.0 || x > scheme.court_width || y < 0.0 ||
      y > scheme.court_height) {
    out.reason = RejectReason::OutOfBounds;
    return out;
  }
  const double dx = x - scheme.basket_x;
  const double dy = y - scheme.basket_y;
  const double r = std::hypot(dx, dy);
  if (r == 0.0) {
    out.accepted = true;
    out.angle_bin = 1;
    out.dist_bin = 1;
    return out;
  }
  const double theta = std::atan2(dy, dx);
  if (theta < 0.0) {
    out.reason = RejectReason::NegativeAngle;
    return out;
  }
  const int a = static_cast<int>(std::ceil(theta / (std::numbers::pi / scheme.n_angle)));
  out.angle_bin = std::clamp(a, 1, scheme.n_angle);
  if (r > scheme.radius) {
    out.dist_bin = scheme.n_dist;
  } else {
    // r in (R sqrt((k-1)/m), R sqrt(k/m)] maps to bin k: equal-area annuli.
    const int m = scheme.n_dist - 1;
    const double q = r / scheme.radius;
    const int k = static_cast<int>(std::ceil(m * q * q));
    out.dist_bin = std::clamp(k, 1, m);
  }
  out.accepted = true;
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding whitespace and CR from line endings.
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back(std::string());
  return out;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

bool parse_int(const std::string& s, int& out) {
  try {
    std::size_t pos = 0;
    out = std::stoi(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

CsvReadResult read_shot_csv(std::istream& in, const ColumnMap& columns) {
  CsvReadResult out;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("read_shot_csv: empty input, expected a header row");
  }
  const std::vector<std::string> header = split_csv_line(line);
  auto find_col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<long>(i);
    }
    throw std::invalid_argument("read_shot_csv: header is missing column '" + name + "'");
  };
  const long ci = find_col(columns.player_id);
  const long cx = find_col(columns.x);
  const long cy = find_col(columns.y);
  const long cp = find_col(columns.period);
  const std::size_t need =
      static_cast<std::size_t>(std::max(std::max(ci, cx), std::max(cy, cp))) + 1;

  long row = 1;
  constexpr std::size_t kMaxMessages = 20;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    ShotEvent ev;
    std::string why;
    if (fields.size() < need) {
      why = "too few fields";
    } else {
      ev.player_id = fields[static_cast<std::size_t>(ci)];
      if (ev.player_id.empty()) why = "empty player_id";
      if (why.empty() && !parse_double(fields[static_cast<std::size_t>(cx)], ev.x)) why = "bad x";
      if (why.empty() && !parse_double(fields[static_cast<std::size_t>(cy)], ev.y)) why = "bad y";
      if (why.empty() && !parse_int(fields[static_cast<std::size_t>(cp)], ev.period)) {
        why = "bad period";
      }
      if (why.empty() && ev.period < 1) why = "period below 1";
    }
    if (!why.empty()) {
      ++out.parse_errors;
      if (out.messages.size() < kMaxMessages) {
        out.messages.push_back("row " + std::to_string(row) + ": " + why);
      }
      continue;
    }
    out.events.push_back(std::move(ev));
  }
  return out;
}

IngestResult build_tensors(const std::vector<ShotEvent>& events, const PartitionScheme& scheme,
                           const IngestFilters& filters, long prior_parse_errors) {
  scheme.validate();
  if (filters.min_attempts < 0) {
    throw std::invalid_argument("build_tensors: min_attempts must be >= 0");
  }
  IngestResult out;
  auto& counts = out.report.counts;
  counts[reject_reason_name(RejectReason::ParseError)] = prior_parse_errors;
  counts[reject_reason_name(RejectReason::OutOfBounds)] = 0;
  counts[reject_reason_name(RejectReason::NegativeAngle)] = 0;
  counts[reject_reason_name(RejectReason::Overtime)] = 0;
  counts[reject_reason_name(RejectReason::BelowMinAttempts)] = 0;
  out.report.total = prior_parse_errors + static_cast<long>(events.size());

  const Dims dims = scheme.dims();
  std::map<std::string, std::vector<std::int64_t>> cells;  // ordered by player id
  std::map<std::string, long> attempts;
  for (const ShotEvent& ev : events) {
    const BinResult bin = polar_bin(ev.x, ev.y, scheme);
    if (!bin.accepted) {
      ++counts[reject_reason_name(bin.reason)];
      continue;
    }
    if (ev.period > scheme.n_quarter) {
      ++counts[reject_reason_name(RejectReason::Overtime)];
      continue;
    }
    auto [it, fresh] = cells.try_emplace(ev.player_id,
                                         static_cast<std::size_t>(dims.cells()), 0);
    const long flat = (static_cast<long>(bin.angle_bin - 1) * dims.p2 + (bin.dist_bin - 1)) *
                          dims.p3 +
                      (ev.period - 1);
    ++it->second[static_cast<std::size_t>(flat)];
    ++attempts[ev.player_id];
  }

  for (auto& [player, grid] : cells) {
    const long got = attempts[player];
    if (got < filters.min_attempts) {
      counts[reject_reason_name(RejectReason::BelowMinAttempts)] += got;
      continue;
    }
    out.report.accepted += got;
    out.tensors.emplace_back(player, dims, std::move(grid));
  }
  return out;
}

}  // namespace tensorclust
