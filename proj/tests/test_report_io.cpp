#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "ruelle/common.hpp"
#include "ruelle/report_io.hpp"

using namespace ruelle;

TEST_SUITE("report_io") {
  TEST_CASE("flat config parsing") {
    std::istringstream is("# comment\n\n  r = 2.5 \nname=W2\ncount = 7\nflag = true\n");
    const FlatConfig c = FlatConfig::parse(is);
    CHECK(c.get_double("r", 0.0) == 2.5);
    CHECK(c.get_string("name", "") == "W2");
    CHECK(c.get_int("count", 0) == 7);
    CHECK(c.get_bool("flag", false));
    CHECK(c.get_double("missing", -1.0) == -1.0);
    CHECK(c.entries().size() == 4);
    CHECK_NOTHROW(c.require_known({"r", "name", "count", "flag"}));
    CHECK_THROWS_AS(c.require_known({"r", "name"}), ConfigError);
  }

  TEST_CASE("malformed configs are rejected") {
    std::istringstream dup("a=1\na=2\n");
    CHECK_THROWS_AS(FlatConfig::parse(dup), ConfigError);
    std::istringstream noeq("just a line\n");
    CHECK_THROWS_AS(FlatConfig::parse(noeq), ConfigError);
    std::istringstream num("x = 1.5abc\ny = 2.5\nb = maybe\n");
    const FlatConfig c = FlatConfig::parse(num);
    CHECK_THROWS_AS(c.get_double("x", 0.0), ConfigError);
    CHECK_THROWS_AS(c.get_int("y", 0), ConfigError);
    CHECK_THROWS_AS(c.get_bool("b", false), ConfigError);
    CHECK_THROWS_AS(FlatConfig::load("/nonexistent/ruelle.cfg"), ConfigError);
  }

  TEST_CASE("doubles round-trip") {
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
      const double v = std::ldexp(rng.normal(), static_cast<int>(rng.uniform(-60.0, 60.0)));
      CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(3.0) == "3");
  }

  TEST_CASE("csv writer") {
    std::ostringstream os;
    {
      CsvWriter w(os, {"a", "b", "c"});
      w.cell(1.5).cell(2LL).cell(std::string("x"));
      w.end_row();
      w.cell(0.0).cell(-1LL).cell(std::string("y"));
      CHECK_THROWS(w.cell(1.0));
      w.end_row();
      w.cell(1.0);
      CHECK_THROWS(w.end_row());
    }
    CHECK(os.str().rfind("a,b,c\n1.5,2,x\n0,-1,y\n", 0) == 0);
  }
}
