#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "error.hpp"
#include "io.hpp"

using namespace selfsim;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("selfsim_io_" + name); }

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("one row gives two lines") {
  Table t{{"a", "b"}, {{1.0, 2.0}}};
  CHECK(to_csv(t) == "a,b\n1,2\n");
}

TEST_CASE("17 significant digits round-trip every double") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-300, 300);
  Table t{{"x"}, {}};
  for (int i = 0; i < 500; ++i) t.rows.push_back({std::ldexp(u(rng), static_cast<int>(u(rng)))});
  t.rows.push_back({std::numeric_limits<double>::denorm_min()});
  t.rows.push_back({0.1});
  const auto path = temp_file("roundtrip.csv");
  write_csv(path.string(), t);
  const auto back = read_csv(path.string());
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(back.rows[i][0] == t.rows[i][0]);
  fs::remove(path);
}

TEST_CASE("decimal separator ignores the C locale") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("unwritable path names the path") {
  const std::string bad = "/nonexistent-dir/x.csv";
  try {
    write_csv(bad, Table{{"a"}, {{1.0}}});
    FAIL("expected Io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
    CHECK(std::string(e.what()).find(bad) != std::string::npos);
  }
}

TEST_CASE("summary round-trip keeps order and values") {
  Summary s;
  s["schema"] = 1;
  s["zeta"] = 0.1;
  s["alpha"] = {{"value", 1e-300}, {"tolerance", 2.5e-7}, {"pass", true}};
  s["list"] = {1.0 / 3.0, -0.0, 12345678.901234567};
  const auto path = temp_file("summary.json");
  write_summary(path.string(), s);
  const auto back = read_summary(path.string());
  CHECK(back == s);
  CHECK(back.begin().key() == "schema");
  CHECK(summary_text(back) == slurp(path));
  fs::remove(path);
}

TEST_CASE("config parsing") {
  auto j = nlohmann::json::parse(R"({"schema":1,"N":3,"p":1.7,"ode":{"rel_tol":1e-11},"pde":{"M":500,"init":"separable"}})");
  const auto c = parse_config(j);
  CHECK(c.N == 3);
  CHECK(c.ode.rel_tol == 1e-11);
  CHECK(c.ode.r_max == 50.0);
  CHECK(c.pde.M == 500);
  CHECK(c.pde.init == InitKind::Separable);
  CHECK(c.pde.params.N == 3);

  // lossless round trip through the schema
  const auto again = parse_config(nlohmann::json::parse(config_to_json(c).dump()));
  CHECK(config_to_json(again) == config_to_json(c));
}

TEST_CASE("unknown keys and schemas are rejected") {
  for (const char* text : {R"({"schema":1,"NN":2})", R"({"ode":{"rtol":1e-9}})", R"({"pde":{"m":5}})",
                           R"({"schema":2})", R"({"p":"x"})"}) {
    CAPTURE(text);
    try {
      parse_config(nlohmann::json::parse(text));
      FAIL("expected rejection");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
    }
  }
  try {
    parse_config(nlohmann::json::parse(R"({"ode":{"rtol":1e-9}})"));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("ode.rtol") != std::string::npos);
  }
}

TEST_CASE("config out of range propagates") {
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"N":2,"p":1.1})")), Error);
}

}
