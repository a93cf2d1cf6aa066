#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "holediff/error.hpp"
#include "holediff/records.hpp"

using namespace holediff;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

}  // namespace

TEST_SUITE("records") {
  TEST_CASE("csv quoting") {
    ScanTable t(ScanKind::Phi, {"k", "note"});
    t.add({Cell::integer(1), Cell::str("a,b")});
    t.add({Cell::integer(2), Cell::str("say \"hi\"")});
    CHECK_THROWS_AS(t.add({Cell::integer(3)}), std::invalid_argument);
    std::ostringstream out;
    write_csv(t, out);
    CHECK(out.str() == "k,note\n1,\"a,b\"\n2,\"say \"\"hi\"\"\"\n");
    CHECK(split_csv_line("2,\"say \"\"hi\"\"\"") == std::vector<std::string>{"2", "say \"hi\""});
    CHECK(split_csv_line("a,,b\r") == std::vector<std::string>{"a", "", "b"});
  }

  TEST_CASE("json lines carry types") {
    ScanTable t(ScanKind::Escape, {"index", "D_exact", "gamma", "flag", "blank"});
    t.add({Cell::integer(3), Cell::exact(q(5, 64)), Cell::real(0.25), Cell::boolean(true),
           Cell::empty()});
    t.add({Cell::integer(4), Cell::exact(q(0)), Cell::real(std::numeric_limits<double>::infinity()),
           Cell::boolean(false), Cell::empty()});
    std::ostringstream out;
    write_json_lines(t, out);
    std::istringstream in(out.str());
    std::string line;
    std::vector<nlohmann::json> rows;
    while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
    REQUIRE(rows.size() == 2u);
    CHECK(rows[0]["record"] == "escape");
    CHECK(rows[0]["index"] == 3);
    CHECK(rows[0]["D_exact"] == "5/64");
    CHECK(rows[0]["gamma"] == 0.25);
    CHECK(rows[0]["flag"] == true);
    CHECK(rows[0]["blank"].is_null());
    CHECK(rows[1]["gamma"].is_null());
    CHECK(rows[1]["D_exact"] == "0/1");
  }

  TEST_CASE("config round trips") {
    const ModelConfig configs[] = {
        ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(3, 16)),
        ModelConfig::non_symmetric(MapKind::Tent, q(1, 12), q(5, 7)),
        ModelConfig(MapKind::Doubling, Placement::General, q(1, 6), q(1, 4), q(2, 3), q(3, 4)),
        ModelConfig::no_holes(MapKind::Tent),
    };
    for (const auto& c : configs) {
      CHECK(config_from_json(config_to_json(c)) == c);
      CHECK(config_from_csv(config_to_csv(c)) == c);
      CHECK(config_from_record(config_record(c)) == c);
    }
    CHECK(config_to_json(configs[0]) ==
          R"({"map_kind":"doubling","placement":"symmetric","a1":"1/8","a2":"3/16","a3":"13/16","a4":"7/8"})");
    CHECK(config_to_csv(configs[0]) == "map_kind,placement,a1,a2,a3,a4\ndoubling,symmetric,1/8,3/16,13/16,7/8\n");
  }

  TEST_CASE("malformed configs") {
    CHECK_THROWS_AS(config_from_json("{"), ConfigError);
    CHECK_THROWS_AS(config_from_json("[1,2]"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"map_kind":"doubling"})"), ConfigError);
    CHECK_THROWS_AS(
        config_from_json(
            R"({"map_kind":"doubling","placement":"symmetric","a1":0.1,"a2":"1/4","a3":"3/4","a4":"9/10"})"),
        ConfigError);
    CHECK_THROWS_AS(
        config_from_json(
            R"({"map_kind":"doubling","placement":"symmetric","a1":"1/x","a2":"1/4","a3":"3/4","a4":"1"})"),
        ConfigError);
    CHECK_THROWS_AS(config_from_csv("map_kind,placement\n"), ConfigError);
    CHECK_THROWS_AS(config_from_csv("map_kind,placement,a1,a2,a3,a4\ndoubling,symmetric,0,1/4,3/4\n"),
                    ConfigError);
    CHECK_THROWS_AS(
        config_from_csv("map_kind,placement,a1,a2,a3,a4\ndoubling,symmetric,0,1/4,1/2,3/4\n"),
        ConfigError);
  }
}
