#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "pvikit/errors.hpp"
#include "pvikit/io.hpp"
#include "pvikit/random.hpp"
#include "pvikit/text.hpp"

using namespace pvikit;

TEST_CASE("utf8 decoding counts scalars, not bytes") {
  CHECK(text::scalar_count("abc") == 3);
  CHECK(text::scalar_count("\xe4\xbd\xa0\xe5\xa5\xbd") == 2);
  CHECK(text::scalar_count("\xf0\x9f\x98\x80x") == 2);
  CHECK(text::scalar_count("") == 0);
  const auto bad = text::decode_utf8("a\xff" "b");
  REQUIRE(bad.size() == 3);
  CHECK(bad[1] == U'\uFFFD');
}

TEST_CASE("utf8 round trip on valid text") {
  const std::string s = "caf\xc3\xa9 \xe4\xbd\xa0 \xf0\x9f\x98\x80";
  CHECK(text::encode_utf8(text::decode_utf8(s)) == s);
}

TEST_CASE("whitespace split and control characters") {
  CHECK(text::split_whitespace("  a  bb\tc\n") == std::vector<std::string>{"a", "bb", "c"});
  CHECK(text::split_whitespace("   ").empty());
  CHECK(text::has_control_char("a\x01z"));
  CHECK(text::has_control_char("tab\there"));
  CHECK_FALSE(text::has_control_char("plain text"));
}

TEST_CASE("doubles survive text formatting") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  CHECK(io::format_double(-0.0) == "0");
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::parse_double(io::format_double(std::numeric_limits<double>::denorm_min())) ==
        std::numeric_limits<double>::denorm_min());
  CHECK_THROWS_AS(io::parse_double("1.5x"), std::invalid_argument);
}

TEST_CASE("csv escaping round trips awkward fields") {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "multi\nline", ""};
  const auto table = io::parse_csv("a,b,c,d,e\n" + io::csv_row(fields));
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0] == fields);
  CHECK(table.column("c") == 2);
  CHECK_THROWS(table.column("zz"));
  CHECK_THROWS(io::parse_csv("a,b\n1,2,3\n"));
  CHECK_THROWS(io::parse_csv("a\n\"open\n"));
}

TEST_CASE("atomic writes leave no temporary behind") {
  const auto dir = std::filesystem::temp_directory_path() / "pvikit_io_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  io::write_file_atomic(path, "first");
  io::write_file_atomic(path, "second");
  CHECK(io::read_file(path) == "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  CHECK_THROWS_AS(io::read_file(dir / "missing.txt"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("rng helpers are deterministic and in range") {
  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(7) < 7);
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  const auto s = r.sample_positions(50, 20);
  CHECK(s.size() == 20);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1] < s[i]);
  CHECK(s.back() < 50);
}
