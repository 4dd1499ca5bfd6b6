#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "quadrec/ppm.hpp"

using namespace quadrec;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path((std::filesystem::temp_directory_path() / name).string()) {}
  ~TempFile() { std::remove(path.c_str()); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("load_ppm: single white pixel") {
  TempFile f("quadrec_ppm_white.ppm");
  write_text(f.path, "P3 1 1 255 255 255 255");
  const auto img = load_ppm(f.path);
  CHECK(img.width == 1);
  CHECK(img.height == 1);
  for (const auto& ch : img.channels) {
    REQUIRE(ch.size() == 1);
    CHECK(ch(0) == 1.0);
  }
}

TEST_CASE("load_ppm: black-white pair and comments") {
  TempFile f("quadrec_ppm_bw.ppm");
  write_text(f.path,
             "P3\n# a comment line\n2 1\n255\n0 0 0 # trailing comment\n255 255 255\n");
  const auto img = load_ppm(f.path);
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  for (const auto& ch : img.channels) {
    CHECK(ch(0) == 0.0);
    CHECK(ch(1) == 1.0);
  }
}

TEST_CASE("save/load: canonical round trip is byte identical") {
  PpmImage img;
  img.width = 4;
  img.height = 3;
  for (int c = 0; c < 3; ++c) {
    img.channels[c].resize(12);
    for (int p = 0; p < 12; ++p)
      img.channels[c](p) = static_cast<double>((p * 37 + c * 91) % 256) / 255.0;
  }
  TempFile a("quadrec_ppm_a.ppm"), b("quadrec_ppm_b.ppm");
  save_ppm(a.path, img);
  const auto loaded = load_ppm(a.path);
  save_ppm(b.path, loaded);
  CHECK(read_text(a.path) == read_text(b.path));
  CHECK(loaded.width == img.width);
  CHECK(loaded.height == img.height);
}

TEST_CASE("load_ppm: error paths carry line numbers") {
  TempFile f("quadrec_ppm_bad.ppm");

  write_text(f.path, "P6 1 1 255 0 0 0");
  CHECK_THROWS_AS(load_ppm(f.path), PpmParseError);

  write_text(f.path, "P3\n2 2\n255\n0 0 0\n");  // truncated on line 4
  try {
    load_ppm(f.path);
    FAIL("expected PpmParseError");
  } catch (const PpmParseError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("end of file") != std::string::npos);
  }

  write_text(f.path, "P3\n1 1\n255\n999 0 0\n");
  CHECK_THROWS_AS(load_ppm(f.path), PpmParseError);

  write_text(f.path, "P3\n1 1\n65535\n0 0 0\n");
  CHECK_THROWS_AS(load_ppm(f.path), PpmParseError);

  CHECK_THROWS_AS(load_ppm("/nonexistent/quadrec.ppm"), std::runtime_error);
}

TEST_CASE("save_ppm: clamps out-of-range values") {
  PpmImage img;
  img.width = 2;
  img.height = 1;
  for (int c = 0; c < 3; ++c) {
    img.channels[c].resize(2);
    img.channels[c](0) = -0.25;
    img.channels[c](1) = 1.75;
  }
  TempFile f("quadrec_ppm_clamp.ppm");
  save_ppm(f.path, img);
  const auto img2 = load_ppm(f.path);
  for (int c = 0; c < 3; ++c) {
    CHECK(img2.channels[c](0) == 0.0);
    CHECK(img2.channels[c](1) == 1.0);
  }
}
