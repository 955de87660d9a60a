// pgm.hpp -- PGM (P2/P5) raster input/output and a CSV matrix reader.
//
// Samples are mapped linearly between [0,1] and [0,maxval]. Binary P5 files
// with maxval > 255 use two bytes per sample, most significant byte first.

#ifndef ADDF_PGM_HPP
#define ADDF_PGM_HPP

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "addf/image.hpp"

namespace addf {

namespace detail {

// Skips whitespace and '#' comments between header tokens.
inline void skip_pgm_separators(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline long read_pgm_number(std::istream& in, const std::string& what) {
  skip_pgm_separators(in);
  long value = -1;
  if (!(in >> value) || value < 0)
    throw std::runtime_error("pgm: bad or missing " + what);
  return value;
}

}  // namespace detail

inline GrayImage read_pgm(std::istream& in, const std::string& name = "<stream>") {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
    throw std::runtime_error("pgm: " + name + ": not a P2/P5 file");
  const bool binary = magic[1] == '5';

  const long width = detail::read_pgm_number(in, "width");
  const long height = detail::read_pgm_number(in, "height");
  const long maxval = detail::read_pgm_number(in, "maxval");
  if (width <= 0 || height <= 0)
    throw std::runtime_error("pgm: " + name + ": empty image");
  if (maxval <= 0 || maxval > 65535)
    throw std::runtime_error("pgm: " + name + ": unsupported maxval " + std::to_string(maxval));

  GrayImage img(static_cast<int>(width), static_cast<int>(height));
  const double scale = 1.0 / static_cast<double>(maxval);

  if (binary) {
    in.get();  // single separator byte after maxval
    const bool wide = maxval > 255;
    const std::size_t n = img.size();
    std::string raw(n * (wide ? 2 : 1), '\0');
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw std::runtime_error("pgm: " + name + ": truncated pixel data");
    for (std::size_t i = 0; i < n; ++i) {
      long v;
      if (wide) {
        v = (static_cast<unsigned char>(raw[2 * i]) << 8) | static_cast<unsigned char>(raw[2 * i + 1]);
      } else {
        v = static_cast<unsigned char>(raw[i]);
      }
      if (v > maxval) throw std::runtime_error("pgm: " + name + ": sample exceeds maxval");
      img.data[i] = static_cast<double>(v) * scale;
    }
  } else {
    for (std::size_t i = 0; i < img.size(); ++i) {
      const long v = detail::read_pgm_number(in, "sample");
      if (v > maxval) throw std::runtime_error("pgm: " + name + ": sample exceeds maxval");
      img.data[i] = static_cast<double>(v) * scale;
    }
  }
  return img;
}

inline GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path);
  return read_pgm(in, path);
}

inline void write_pgm(std::ostream& out, const GrayImage& img, int maxval = 255,
                      bool binary = true) {
  if (img.empty()) throw std::invalid_argument("pgm: refusing to write empty image");
  if (maxval != 255 && maxval != 65535)
    throw std::invalid_argument("pgm: maxval must be 255 or 65535");
  out << (binary ? "P5" : "P2") << "\n" << img.width << " " << img.height << "\n" << maxval << "\n";
  const bool wide = maxval > 255;
  for (std::size_t i = 0; i < img.size(); ++i) {
    double v = img.data[i];
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    const long s = std::lround(v * maxval);
    if (binary) {
      if (wide) out.put(static_cast<char>((s >> 8) & 0xff));
      out.put(static_cast<char>(s & 0xff));
    } else {
      out << s << ((i + 1) % img.width == 0 ? '\n' : ' ');
    }
  }
}

inline void write_pgm(const std::string& path, const GrayImage& img, int maxval = 255,
                      bool binary = true) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot open " + path + " for writing");
  write_pgm(out, img, maxval, binary);
  if (!out) throw std::runtime_error("pgm: write failed for " + path);
}

// Plain CSV matrix of unit-interval values, one row per line. Used by tests
// and as an alternative raster source.
inline GrayImage read_csv_matrix(std::istream& in, const std::string& name = "<stream>") {
  std::vector<double> values;
  int width = -1, height = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    int count = 0;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("csv: " + name + ": bad cell '" + cell + "'");
      }
      ++count;
    }
    if (width < 0) width = count;
    if (count != width) throw std::runtime_error("csv: " + name + ": ragged rows");
    ++height;
  }
  if (width <= 0 || height == 0) throw std::runtime_error("csv: " + name + ": no data");
  GrayImage img(width, height);
  img.data = std::move(values);
  check_unit_interval(img, "csv: " + name);
  return img;
}

inline GrayImage read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  return read_csv_matrix(in, path);
}

}  // namespace addf

#endif
