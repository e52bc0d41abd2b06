#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "tensorclust/ingest.hpp"
#include "tensorclust/rng.hpp"

using namespace tensorclust;

namespace {

// Places a point at polar coordinates (r, theta) around the scheme's basket.
ShotEvent at_polar(double r, double theta, const PartitionScheme& s,
                   const std::string& id = "p", int period = 1) {
  ShotEvent ev;
  ev.player_id = id;
  ev.x = s.basket_x + r * std::cos(theta);
  ev.y = s.basket_y + r * std::sin(theta);
  ev.period = period;
  return ev;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("scheme validation") {
  PartitionScheme s;
  CHECK_NOTHROW(s.validate());
  CHECK(s.dims() == Dims{11, 12, 4});

  PartitionScheme bad = s;
  bad.n_dist = 1;  // needs at least one ring plus the far bin
  CHECK_THROWS(bad.validate());
  bad = s;
  bad.radius = 0.0;
  CHECK_THROWS(bad.validate());
  bad = s;
  bad.basket_x = -1.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("origin and axis points bin deterministically") {
  const PartitionScheme s;
  const BinResult origin = polar_bin(s.basket_x, s.basket_y, s);
  REQUIRE(origin.accepted);
  CHECK(origin.angle_bin == 1);
  CHECK(origin.dist_bin == 1);

  // theta = 0: along the positive x axis from the basket.
  const BinResult right = polar_bin(s.basket_x + 5.0, s.basket_y, s);
  REQUIRE(right.accepted);
  CHECK(right.angle_bin == 1);
  CHECK(right.dist_bin == 1);

  // theta = pi lands in the last arc.
  const BinResult left = polar_bin(s.basket_x - 5.0, s.basket_y, s);
  REQUIRE(left.accepted);
  CHECK(left.angle_bin == s.n_angle);
}

TEST_CASE("distance boundaries are upper-closed") {
  // n_dist = 5 gives ring boundary radius * sqrt(1/4) = 15, exact in floating
  // point, so the boundary itself must land in bin 1.
  PartitionScheme s;
  s.n_dist = 5;
  const BinResult on = polar_bin(s.basket_x, s.basket_y + 15.0, s);
  REQUIRE(on.accepted);
  CHECK(on.dist_bin == 1);
  const BinResult above = polar_bin(s.basket_x, s.basket_y + 15.0 + 1e-6, s);
  REQUIRE(above.accepted);
  CHECK(above.dist_bin == 2);

  // Default scheme: straddle the first equal-area boundary with a margin that
  // dwarfs rounding.
  const PartitionScheme d;
  const double r1 = d.radius * std::sqrt(1.0 / (d.n_dist - 1));
  CHECK(polar_bin(d.basket_x, d.basket_y + r1 * (1.0 - 1e-9), d).dist_bin == 1);
  CHECK(polar_bin(d.basket_x, d.basket_y + r1 * (1.0 + 1e-9), d).dist_bin == 2);
}

TEST_CASE("angle bins split the half disc into equal arcs") {
  const PartitionScheme s;
  const double arc = std::numbers::pi / s.n_angle;
  for (int a = 1; a <= s.n_angle; ++a) {
    const double mid = (a - 0.5) * arc;
    const ShotEvent ev = at_polar(10.0, mid, s);
    const BinResult bin = polar_bin(ev.x, ev.y, s);
    REQUIRE(bin.accepted);
    CHECK(bin.angle_bin == a);
  }
  // Boundary between arcs 1 and 2, straddled with margin.
  const ShotEvent lo = at_polar(10.0, arc * (1.0 - 1e-9), s);
  const ShotEvent hi = at_polar(10.0, arc * (1.0 + 1e-9), s);
  CHECK(polar_bin(lo.x, lo.y, s).angle_bin == 1);
  CHECK(polar_bin(hi.x, hi.y, s).angle_bin == 2);
}

TEST_CASE("far and rejected regions") {
  const PartitionScheme s;
  // Exactly radius stays in ring 11; farther on-court points go to bin 12.
  const BinResult rim = polar_bin(s.basket_x, s.basket_y + s.radius, s);
  REQUIRE(rim.accepted);
  CHECK(rim.dist_bin == s.n_dist - 1);
  const BinResult far = polar_bin(s.basket_x, s.basket_y + s.radius + 5.0, s);
  REQUIRE(far.accepted);
  CHECK(far.dist_bin == s.n_dist);

  // Behind the line through the basket: negative angle.
  const BinResult behind = polar_bin(s.basket_x + 3.0, s.basket_y - 1.0, s);
  CHECK_FALSE(behind.accepted);
  CHECK(behind.reason == RejectReason::NegativeAngle);
  const BinResult behind_left = polar_bin(s.basket_x - 3.0, s.basket_y - 1.0, s);
  CHECK(behind_left.reason == RejectReason::NegativeAngle);

  // Off court beats the angle test even when both apply.
  const BinResult off = polar_bin(s.court_width + 1.0, s.basket_y - 1.0, s);
  CHECK_FALSE(off.accepted);
  CHECK(off.reason == RejectReason::OutOfBounds);
  CHECK(polar_bin(-0.1, 10.0, s).reason == RejectReason::OutOfBounds);
  CHECK(polar_bin(10.0, -0.1, s).reason == RejectReason::OutOfBounds);
  CHECK(polar_bin(10.0, s.court_height + 0.1, s).reason == RejectReason::OutOfBounds);
  CHECK(polar_bin(std::numeric_limits<double>::quiet_NaN(), 10.0, s).reason ==
        RejectReason::OutOfBounds);
  CHECK(polar_bin(10.0, std::numeric_limits<double>::infinity(), s).reason ==
        RejectReason::OutOfBounds);
}

TEST_CASE("csv reader maps columns by header name") {
  std::istringstream in(
      "extra,period,player_id,y,x\n"
      "1,2,alice,10.5,25.0\n"
      "9,1,bob,6.0,30.0\n");
  const CsvReadResult got = read_shot_csv(in);
  CHECK(got.parse_errors == 0);
  REQUIRE(got.events.size() == 2);
  CHECK(got.events[0].player_id == "alice");
  CHECK(got.events[0].x == 25.0);
  CHECK(got.events[0].y == 10.5);
  CHECK(got.events[0].period == 2);
  CHECK(got.events[1].player_id == "bob");
}

TEST_CASE("csv reader honors a custom column map") {
  std::istringstream in(
      "shooter,loc_x,loc_y,qtr\n"
      "carol,12,8,3\n");
  ColumnMap cols;
  cols.player_id = "shooter";
  cols.x = "loc_x";
  cols.y = "loc_y";
  cols.period = "qtr";
  const CsvReadResult got = read_shot_csv(in, cols);
  REQUIRE(got.events.size() == 1);
  CHECK(got.events[0].player_id == "carol");
  CHECK(got.events[0].period == 3);
}

TEST_CASE("csv reader treats a missing column as fatal") {
  std::istringstream in("player_id,x,y\nalice,1,2\n");
  CHECK_THROWS_WITH_AS(read_shot_csv(in),
                       "read_shot_csv: header is missing column 'period'",
                       std::invalid_argument);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_shot_csv(empty), std::invalid_argument);
}

TEST_CASE("csv reader counts malformed rows and keeps going") {
  std::istringstream in(
      "player_id,x,y,period\n"
      "alice,25,10,1\n"
      "bob,25,10\n"           // too few fields
      ",25,10,1\n"            // empty id
      "carol,abc,10,1\n"      // bad x
      "dave,25,10,0\n"        // period below 1
      "erin,25,1e1,2\n"       // fine: scientific notation
      "\n"                    // blank line, not an error
      "frank,25,10,1.5\n");   // bad period
  const CsvReadResult got = read_shot_csv(in);
  CHECK(got.parse_errors == 5);
  REQUIRE(got.events.size() == 2);
  CHECK(got.events[1].player_id == "erin");
  CHECK(got.events[1].y == 10.0);
  REQUIRE(got.messages.size() == 5);
  CHECK(got.messages[0] == "row 3: too few fields");
  CHECK(got.messages[1] == "row 4: empty player_id");
  CHECK(got.messages[2] == "row 5: bad x");
  CHECK(got.messages[3] == "row 6: period below 1");
  CHECK(got.messages[4] == "row 9: bad period");
}

TEST_CASE("csv reader strips CRLF endings") {
  std::istringstream in("player_id,x,y,period\r\nalice,25,10,1\r\n\r\n");
  const CsvReadResult got = read_shot_csv(in);
  CHECK(got.parse_errors == 0);
  REQUIRE(got.events.size() == 1);
  CHECK(got.events[0].player_id == "alice");
  CHECK(got.events[0].period == 1);
}

TEST_CASE("build_tensors places a single event in its cell") {
  const PartitionScheme s;
  std::vector<ShotEvent> events;
  // Straight up from the basket at r = 10, quarter 2.
  events.push_back(at_polar(10.0, std::numbers::pi / 2.0, s, "solo", 2));
  const BinResult expect = polar_bin(events[0].x, events[0].y, s);
  REQUIRE(expect.accepted);

  IngestFilters f;
  f.min_attempts = 1;
  const IngestResult got = build_tensors(events, s, f);
  REQUIRE(got.tensors.size() == 1);
  CHECK(got.tensors[0].unit_id() == "solo");
  CHECK(got.tensors[0].dims() == s.dims());
  CHECK(got.tensors[0].grand_total() == 1);
  CHECK(got.tensors[0].at(expect.angle_bin - 1, expect.dist_bin - 1, 1) == 1);
  CHECK(got.report.accepted == 1);
  CHECK(got.report.total == 1);
}

TEST_CASE("build_tensors applies the documented check order") {
  const PartitionScheme s;
  std::vector<ShotEvent> events;
  events.push_back(at_polar(8.0, 1.0, s, "a", 1));
  events.push_back(at_polar(8.0, 1.2, s, "a", 5));  // overtime
  ShotEvent off = at_polar(8.0, 1.0, s, "a", 9);
  off.x = s.court_width + 2.0;
  off.period = 9;  // off court wins over overtime
  events.push_back(off);
  events.push_back(at_polar(3.0, -0.4, s, "a", 1));  // behind the basket line

  IngestFilters f;
  f.min_attempts = 0;
  const IngestResult got = build_tensors(events, s, f, 2);
  CHECK(got.report.counts.at("parse_error") == 2);
  CHECK(got.report.counts.at("overtime") == 1);
  CHECK(got.report.counts.at("out_of_bounds") == 1);
  CHECK(got.report.counts.at("negative_angle") == 1);
  CHECK(got.report.counts.at("player_below_min_attempts") == 0);
  CHECK(got.report.accepted == 1);
  CHECK(got.report.total == 2 + 4);
}

TEST_CASE("attempt threshold drops strictly-below players only") {
  const PartitionScheme s;
  std::vector<ShotEvent> events;
  for (int i = 0; i < 3; ++i) events.push_back(at_polar(6.0 + i, 0.8, s, "keep"));
  for (int i = 0; i < 2; ++i) events.push_back(at_polar(6.0 + i, 0.8, s, "drop"));

  IngestFilters f;
  f.min_attempts = 3;
  const IngestResult got = build_tensors(events, s, f);
  REQUIRE(got.tensors.size() == 1);
  CHECK(got.tensors[0].unit_id() == "keep");
  CHECK(got.tensors[0].grand_total() == 3);
  CHECK(got.report.counts.at("player_below_min_attempts") == 2);
  CHECK(got.report.accepted == 3);

  f.min_attempts = -1;
  CHECK_THROWS(build_tensors(events, s, f));
}

TEST_CASE("tensors come back sorted by player id with counts conserved") {
  const PartitionScheme s;
  Rng rng(73);
  std::vector<ShotEvent> events;
  const std::vector<std::string> ids{"zeta", "alpha", "mid"};
  for (int i = 0; i < 400; ++i) {
    const double r = rng.uniform() * (s.radius + 8.0);
    const double theta = rng.uniform() * std::numbers::pi;
    events.push_back(
        at_polar(r, theta, s, ids[static_cast<std::size_t>(i % 3)], rng.uniform_int(1, 5)));
  }
  IngestFilters f;
  f.min_attempts = 1;
  const IngestResult got = build_tensors(events, s, f);
  REQUIRE(got.tensors.size() == 3);
  CHECK(got.tensors[0].unit_id() == "alpha");
  CHECK(got.tensors[1].unit_id() == "mid");
  CHECK(got.tensors[2].unit_id() == "zeta");

  std::int64_t grand = 0;
  for (const CountTensor& t : got.tensors) {
    CHECK(t.dims() == s.dims());
    grand += t.grand_total();
  }
  CHECK(grand == got.report.accepted);
  long rejected = 0;
  for (const auto& [name, c] : got.report.counts) rejected += c;
  CHECK(got.report.accepted + rejected == got.report.total);
}

}  // TEST_SUITE
