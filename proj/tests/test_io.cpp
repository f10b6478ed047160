#include <doctest.h>

#include <sstream>

#include "spiraldim/error.hpp"
#include "spiraldim/io.hpp"
#include "support.hpp"

using namespace spiraldim;

TEST_CASE("curve CSV round trip is exact") {
  const Curve c = testing::circle(0.7, 333, 2.0);
  std::ostringstream out;
  io::write_curve(out, c);
  CHECK(out.str().rfind("t,x,y\n", 0) == 0);
  std::istringstream in(out.str());
  const Curve d = io::read_curve(in);
  REQUIRE(d.size() == c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(d.param(i) == c.param(i));
    CHECK(d.coord(i, 0) == c.coord(i, 0));
    CHECK(d.coord(i, 1) == c.coord(i, 1));
  }
}

TEST_CASE("read_curve rejects malformed input") {
  std::istringstream bad_header("a,b,c\n0,1,2\n");
  CHECK_THROWS_AS(io::read_curve(bad_header), PreconditionError);
  std::istringstream bad_value("t,x,y\n0,1,2\n1,zz,3\n");
  CHECK_THROWS_AS(io::read_curve(bad_value), PreconditionError);
}

TEST_CASE("config parsing") {
  const io::Config c = io::Config::parse("# comment\n a = 1\nb=2.5 # trailing\nlist = 1, 2 3\nflag = true\na = 4\n");
  CHECK(c.get_int("a", 0) == 4);
  CHECK(c.get_double("b", 0) == 2.5);
  CHECK(c.get_doubles("list", {}) == std::vector<double>{1, 2, 3});
  CHECK(c.get_bool("flag", false));
  CHECK(c.get("missing", "x") == "x");
  CHECK_THROWS_AS(io::Config::parse("novalue\n"), PreconditionError);
  CHECK_THROWS_AS(c.get_int("b", 0), PreconditionError);
}

TEST_CASE("number parsing") {
  CHECK(io::parse_double("1/3", "f") == doctest::Approx(1.0 / 3.0));
  CHECK(io::parse_double("-2e-3", "f") == -2e-3);
  CHECK(io::parse_int("1e6", "n") == 1'000'000);
  CHECK_THROWS_AS(io::parse_double("1.5x", "f"), PreconditionError);
  CHECK_THROWS_AS(io::parse_int("2.5", "n"), PreconditionError);
  CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("key value block") {
  std::ostringstream out;
  io::write_key_values(out, {{"a", "1"}, {"b", "two"}});
  CHECK(out.str() == "a=1\nb=two\n");
}
