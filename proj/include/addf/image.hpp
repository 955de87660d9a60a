// image.hpp -- row-major 2-D grids of doubles.
//
// The same storage backs three semantically different products of the
// pipeline, kept apart with tag types: raster intensities in [0,1], clipped
// pairwise differences in [-1,0], and normalized variance values in [0,1].

#ifndef ADDF_IMAGE_HPP
#define ADDF_IMAGE_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace addf {

template <class Tag>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // row-major, data[y * width + x]

  Grid() = default;
  Grid(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
    if (w < 0 || h < 0) throw std::invalid_argument("Grid: negative dimensions");
  }

  bool empty() const { return width <= 0 || height <= 0; }
  std::size_t size() const { return data.size(); }

  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
};

struct gray_tag {};
struct diff_tag {};
struct variance_tag {};

using GrayImage = Grid<gray_tag>;
using DiffMatrix = Grid<diff_tag>;
using VarianceMap = Grid<variance_tag>;

template <class TagA, class TagB>
bool same_shape(const Grid<TagA>& a, const Grid<TagB>& b) {
  return a.width == b.width && a.height == b.height;
}

// Variance values already live in [0,1], so a variance map can be treated as
// image data for blurring and segmentation.
inline GrayImage as_image(const VarianceMap& v) {
  GrayImage g;
  g.width = v.width;
  g.height = v.height;
  g.data = v.data;
  return g;
}

inline void check_unit_interval(const GrayImage& img, const std::string& what) {
  for (double v : img.data)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument(what + ": intensity " + std::to_string(v) + " outside [0,1]");
}

}  // namespace addf

#endif
