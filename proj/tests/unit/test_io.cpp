#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "isospec/io.hpp"

using namespace isospec;

TEST_CASE("sha256 test vectors") {
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("doubles round trip through their decimal form") {
  for (double v : {0.1, 1.0 / 3, 3.75e-1, 1e-300, -2.5e17}) CHECK(std::stod(io::format_double(v)) == v);
  CHECK(io::format_double(0.375) == "0.375");
  CHECK(io::format_double(INFINITY) == "inf");
  CHECK(io::format_double(-INFINITY) == "-inf");
  CHECK(io::format_double(NAN) == "nan");
}

TEST_CASE("csv rendering puts metadata after the rows") {
  io::CsvTable t({"t", "p"});
  t.add_row({"0", "1"});
  t.add_row({"2", "0.5"});
  CHECK(t.rows() == 2);
  auto s = t.render({{"b", 2}, {"a", "x"}});
  CHECK(s == "t,p\n0,1\n2,0.5\n# a: \"x\"\n# b: 2\n");
}

TEST_CASE("output directory records checksums") {
  auto root = std::filesystem::temp_directory_path() / "isospec_io_test";
  std::filesystem::remove_all(root);
  io::OutputDir out(root);
  out.write("a.txt", "abc");
  out.write_json("b.json", {{"z", 1}, {"a", 2}});
  REQUIRE(out.files().size() == 2);
  CHECK(out.files()[0].sha256 == io::sha256_hex("abc"));
  CHECK(out.files()[0].bytes == 3);
  std::ifstream in(root / "b.json");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == io::canonical_json({{"a", 2}, {"z", 1}}));
  CHECK(out.files()[1].sha256 == io::sha256_hex(ss.str()));
  std::filesystem::remove_all(root);
}
