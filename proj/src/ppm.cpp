#include "quadrec/ppm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace quadrec {

namespace {

// Whitespace/comment-aware integer scanner that tracks the current line.
class Scanner {
 public:
  Scanner(std::istream& in, const std::string& path) : in_(in), path_(path) {}

  int line() const { return line_; }

  int next_int(const char* what) {
    skip_separators();
    int c = in_.peek();
    if (c == EOF) fail(std::string("unexpected end of file, expected ") + what);
    if (c < '0' || c > '9')
      fail(std::string("expected ") + what + ", got '" + char(c) + "'");
    long value = 0;
    while ((c = in_.peek()) >= '0' && c <= '9') {
      value = value * 10 + (c - '0');
      if (value > 1 << 20) fail(std::string(what) + " out of range");
      in_.get();
    }
    return static_cast<int>(value);
  }

  void expect_magic() {
    if (in_.get() != 'P' || in_.get() != '3') fail("not a P3 pixmap");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw PpmParseError(path_, line_, msg);
  }

 private:
  void skip_separators() {
    for (;;) {
      int c = in_.peek();
      if (c == '#') {
        while (c != EOF && c != '\n') c = in_.get();
        ++line_;
      } else if (c == '\n') {
        ++line_;
        in_.get();
      } else if (c == ' ' || c == '\t' || c == '\r') {
        in_.get();
      } else {
        return;
      }
    }
  }

  std::istream& in_;
  std::string path_;
  int line_ = 1;
};

}  // namespace

PpmImage load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_ppm: cannot open " + path);
  Scanner scan(in, path);
  scan.expect_magic();
  PpmImage img;
  img.width = scan.next_int("width");
  img.height = scan.next_int("height");
  if (img.width < 1 || img.height < 1) scan.fail("degenerate dimensions");
  const int maxval = scan.next_int("maxval");
  if (maxval != 255) scan.fail("only maxval 255 is supported");

  const Index count = img.pixels();
  for (auto& ch : img.channels) ch.resize(count);
  for (Index p = 0; p < count; ++p) {
    for (int c = 0; c < 3; ++c) {
      const int v = scan.next_int("sample value");
      if (v > maxval) scan.fail("sample value exceeds maxval");
      img.channels[c](p) = static_cast<Real>(v) / 255.0;
    }
  }
  return img;
}

void save_ppm(const std::string& path, const PpmImage& image) {
  if (image.width < 1 || image.height < 1)
    throw std::invalid_argument("save_ppm: degenerate dimensions");
  for (const auto& ch : image.channels)
    if (ch.size() != image.pixels())
      throw std::invalid_argument("save_ppm: channel length mismatch");

  std::ostringstream out;
  out << "P3\n" << image.width << ' ' << image.height << "\n255\n";
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Index p = static_cast<Index>(y) * image.width + x;
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(image.channels[c](p), 0.0, 1.0);
        out << static_cast<int>(std::lround(v * 255.0));
        out << (x + 1 == image.width && c == 2 ? '\n' : ' ');
      }
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("save_ppm: cannot open " + path);
  file << out.str();
  if (!file) throw std::runtime_error("save_ppm: write failed for " + path);
}

}  // namespace quadrec
