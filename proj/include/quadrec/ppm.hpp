#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "quadrec/types.hpp"

namespace quadrec {

// Plain-text (P3) portable pixmap, maxval 255. Channels are stored as real
// vectors in [0, 1], pixels in row-major order.
struct PpmImage {
  int width = 0;
  int height = 0;
  std::array<RVec, 3> channels;

  Index pixels() const { return static_cast<Index>(width) * height; }
};

class PpmParseError : public std::runtime_error {
 public:
  PpmParseError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

PpmImage load_ppm(const std::string& path);

/// Canonical writer: "P3\n<w> <h>\n255\n" then one line of space-separated
/// r g b triples per pixel row. load_ppm(save_ppm(img)) round-trips byte
/// for byte on canonical files.
void save_ppm(const std::string& path, const PpmImage& image);

}  // namespace quadrec
