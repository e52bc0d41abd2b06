#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tensorclust/tensor.hpp"

namespace tensorclust {

// Polar partition of the offensive half court. The basket is the origin;
// angles run 0..pi across 11 equal arcs, and the first 11 distance bins are
// equal-area annular sectors out to `radius` (boundaries at
// radius * sqrt(k/11)); everything farther but still on the court falls in
// distance bin 12. Lengths in feet.
struct PartitionScheme {
  int n_angle = 11;
  int n_dist = 12;
  int n_quarter = 4;
  double basket_x = 25.0;
  double basket_y = 5.25;
  double radius = 30.0;
  double court_width = 50.0;   // baseline, x in [0, court_width]
  double court_height = 47.0;  // baseline to midcourt, y in [0, court_height]

  void validate() const;
  Dims dims() const { return Dims{n_angle, n_dist, n_quarter}; }
};

enum class RejectReason {
  ParseError,
  OutOfBounds,
  NegativeAngle,
  Overtime,
  BelowMinAttempts,
};
const char* reject_reason_name(RejectReason r);

struct BinResult {
  bool accepted = false;
  int angle_bin = 0;  // 1..11
  int dist_bin = 0;   // 1..12
  RejectReason reason = RejectReason::OutOfBounds;
};

// Deterministic cell assignment for an on-court location. Bin intervals are
// upper-closed; the exact origin goes to (1, 1) and theta = 0 to angle bin 1.
// Points behind the baseline-parallel line through the basket (negative
// angle) are rejected, as are points off the court rectangle.
BinResult polar_bin(double x, double y, const PartitionScheme& scheme);

struct ShotEvent {
  std::string player_id;
  double x = 0.0;
  double y = 0.0;
  int period = 0;  // 1..4 regulation, larger values are overtime
};

// Header-name to column mapping for third-party CSV exports.
struct ColumnMap {
  std::string player_id = "player_id";
  std::string x = "x";
  std::string y = "y";
  std::string period = "period";
};

struct CsvReadResult {
  std::vector<ShotEvent> events;
  long parse_errors = 0;
  std::vector<std::string> messages;  // first few malformed-row diagnostics
};

// Parses a headered CSV of shot events. A malformed row counts as one parse
// error and is skipped; a missing required column in the header is fatal.
CsvReadResult read_shot_csv(std::istream& in, const ColumnMap& columns = {});

struct IngestFilters {
  long min_attempts = 300;  // drop players with fewer accepted attempts
};

struct RejectionReport {
  std::map<std::string, long> counts;  // reason name -> events rejected
  long accepted = 0;                   // events that landed in a tensor cell
  long total = 0;                      // all input rows, including parse errors
};

struct IngestResult {
  std::vector<CountTensor> tensors;  // one per retained player, sorted by id
  RejectionReport report;
};

// Bins events into per-player count tensors. Checks run in a fixed order per
// event (bounds, angle, overtime); players whose accepted attempts fall below
// the threshold are dropped with their events counted under
// player_below_min_attempts. Accepted events equal the sum of grand totals.
IngestResult build_tensors(const std::vector<ShotEvent>& events, const PartitionScheme& scheme,
                           const IngestFilters& filters, long prior_parse_errors = 0);

}  // namespace tensorclust
