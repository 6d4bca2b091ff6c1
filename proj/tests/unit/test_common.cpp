#include <set>

#include "doctest.h"
#include "testbed/common/csv.hpp"
#include "testbed/common/ipv4.hpp"
#include "testbed/common/random.hpp"
#include "testbed/common/time.hpp"

using namespace testbed;

TEST_CASE("csv: quoted fields, CRLF and blank lines") {
  auto rows = csv::parse("a,b\r\n\"x,1\",\"say \"\"hi\"\"\"\n\nlast,\"multi\nline\"\n");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].fields == std::vector<std::string>{"x,1", "say \"hi\""});
  CHECK(rows[2].fields[1] == "multi\nline");
  CHECK(rows[2].line == 4);
}

TEST_CASE("csv: unterminated quote is an error") {
  CHECK_THROWS_AS(csv::parse("a,\"b\n"), csv::CsvError);
}

TEST_CASE("csv: table header must match") {
  CHECK_THROWS_AS(csv::Table("x,y\n1,2\n", {"x", "z"}), csv::CsvError);
  csv::Table t("x,y\n1\n", {"x", "y"});
  CHECK(t.field(t.rows()[0], "x") == "1");
  CHECK(t.field(t.rows()[0], "y").empty());
}

TEST_CASE("csv: escape round-trips through parse") {
  const std::vector<std::string> fields{"plain", "a,b", "q\"q", "", "line\nbreak"};
  auto rows = csv::parse(csv::join(fields) + "\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].fields == fields);
  CHECK(csv::escape("plain") == "plain");
}

TEST_CASE("ipv4: parse, format and prefix containment") {
  CHECK(Ipv4Addr::parse("10.1.10.16").to_string() == "10.1.10.16");
  CHECK_FALSE(Ipv4Addr::try_parse("10.1.10"));
  CHECK_FALSE(Ipv4Addr::try_parse("256.0.0.1"));
  CHECK_FALSE(Ipv4Addr::try_parse("01.2.3.4x"));
  auto p = Ipv4Prefix::parse("200.100.0.0/26");
  CHECK(p.contains(Ipv4Addr::parse("200.100.0.63")));
  CHECK_FALSE(p.contains(Ipv4Addr::parse("200.100.0.64")));
  CHECK(p.broadcast().to_string() == "200.100.0.63");
  CHECK_FALSE(Ipv4Prefix::parse("10.1.10.5/24").is_canonical());
  CHECK(Ipv4Prefix::parse("0.0.0.0/0").contains(Ipv4Addr::parse("9.9.9.9")));
  CHECK_FALSE(Ipv4Prefix::try_parse("10.0.0.0/33"));
}

TEST_CASE("time: time of day and ISO-8601 with offsets") {
  auto t = TimeOfDay::try_parse("9:00");
  REQUIRE(t);
  CHECK(t->minutes() == 540);
  CHECK(t->to_string() == "9:00");
  CHECK_FALSE(TimeOfDay::try_parse("24:01"));
  CHECK_FALSE(TimeOfDay::try_parse("9:5"));

  auto a = parse_iso8601("2018-07-25T15:01:51+02:00");
  auto b = parse_iso8601("2018-07-25T13:01:51Z");
  REQUIRE(a);
  REQUIRE(b);
  CHECK(*a == *b);
  CHECK(format_iso8601(*a) == "2018-07-25T13:01:51.000000Z");
  auto frac = parse_iso8601("2018-07-25T13:01:51.25Z");
  REQUIRE(frac);
  CHECK(epoch_us(*frac) - epoch_us(*b) == 250000);

  auto d = parse_date("2018-07-25");
  REQUIRE(d);
  CHECK(format_date(*d) == "2018-07-25");
  CHECK_FALSE(parse_date("2018-02-30"));
}

TEST_CASE("rng: fixed seed gives a fixed stream, bounds hold") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(7);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 5000; ++i) {
    auto v = r.uniform_int(1, 20);
    CHECK(v >= 1);
    CHECK(v <= 20);
    seen.insert(v);
    auto x = r.uniform_real(5.0, 10.0);
    CHECK(x >= 5.0);
    CHECK(x < 10.0);
  }
  CHECK(seen.size() == 20);
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, std::uint64_t{0}) != derive_seed(2, std::uint64_t{0}));
  // FNV-1a 64 reference value for "a".
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}
