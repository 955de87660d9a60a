// imaging.hpp -- the raster pipeline: block approximation, clipped pairwise
// differencing, per-cell variance across a season of differences, Gaussian
// blurring, 1-D K-means segmentation into sectors and severity binning.
//
// Cells whose intensity varies little across the difference series are the
// suspicious ones (stalled or dying growth), so sectors are ranked most
// severe first by ascending mean variance.

#ifndef ADDF_IMAGING_HPP
#define ADDF_IMAGING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "addf/image.hpp"

namespace addf {

// Block-mean downsampling. Output cell (I,J) averages the source pixels in
// [I*p, min((I+1)*p, w)) x [J*p, min((J+1)*p, h)); partial edge blocks use
// the true (smaller) population.
inline GrayImage approximate(const GrayImage& img, int block) {
  if (block < 1) throw std::invalid_argument("approximate: block size must be >= 1");
  if (img.empty()) throw std::invalid_argument("approximate: empty image");
  const int out_w = (img.width + block - 1) / block;
  const int out_h = (img.height + block - 1) / block;
  GrayImage out(out_w, out_h);
  for (int J = 0; J < out_h; ++J) {
    const int y0 = J * block, y1 = std::min((J + 1) * block, img.height);
    for (int I = 0; I < out_w; ++I) {
      const int x0 = I * block, x1 = std::min((I + 1) * block, img.width);
      double sum = 0.0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) sum += img.at(x, y);
      out.at(I, J) = sum / (static_cast<double>(x1 - x0) * static_cast<double>(y1 - y0));
    }
  }
  return out;
}

// Which side of the pairwise difference to keep. `negative` is the verbatim
// min(a-b, 0) rule (retains cells where the later capture is brighter);
// `positive` keeps declines instead, negated to min(b-a, 0) so either mode
// yields a non-positive matrix.
enum class DiffClip { negative, positive };

inline DiffMatrix diff(const GrayImage& earlier, const GrayImage& later, int block,
                       DiffClip clip = DiffClip::negative) {
  if (!same_shape(earlier, later))
    throw std::invalid_argument("diff: image dimensions differ");
  const GrayImage a = approximate(earlier, block);
  const GrayImage b = approximate(later, block);
  DiffMatrix d(a.width, a.height);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double delta = clip == DiffClip::negative ? a.data[i] - b.data[i] : b.data[i] - a.data[i];
    d.data[i] = std::min(delta, 0.0);
  }
  return d;
}

// Per-cell population variance across a list of difference matrices, divided
// by the maximum cell value afterwards. Fewer than two inputs give an
// all-zero map; so does a zero maximum (nothing to normalize by).
inline VarianceMap variance_map(const std::vector<DiffMatrix>& diffs, int fallback_width = 0,
                                int fallback_height = 0) {
  if (diffs.empty()) return VarianceMap(fallback_width, fallback_height);
  for (const DiffMatrix& d : diffs)
    if (!same_shape(d, diffs.front()))
      throw std::invalid_argument("variance_map: difference dimensions differ");
  VarianceMap v(diffs.front().width, diffs.front().height);
  if (diffs.size() < 2) return v;

  const double n = static_cast<double>(diffs.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double mean = 0.0;
    for (const DiffMatrix& d : diffs) mean += d.data[i];
    mean /= n;
    double acc = 0.0;
    for (const DiffMatrix& d : diffs) {
      const double dev = d.data[i] - mean;
      acc += dev * dev;
    }
    v.data[i] = acc / n;
  }
  const double max = *std::max_element(v.data.begin(), v.data.end());
  if (max > 0.0)
    for (double& x : v.data) x /= max;
  return v;
}

// Gaussian convolution with the kernel truncated at radius ceil(3*sigma),
// renormalized to unit sum, clamp-to-edge borders. The kernel is separable
// and the clamped two-pass result equals the full 2-D sum.
inline GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blur: sigma must be > 0");
  if (img.empty()) throw std::invalid_argument("gaussian_blur: empty image");

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (static_cast<double>(i) * i) / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& w : kernel) w /= sum;

  const auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };

  GrayImage rows(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * img.at(clampi(x + i, img.width - 1), y);
      rows.at(x, y) = acc;
    }
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * rows.at(x, clampi(y + i, img.height - 1));
      out.at(x, y) = acc;
    }
  return out;
}

struct KMeans1DResult {
  std::vector<double> centroids;  // ascending after convergence when separated
  std::vector<int> labels;        // per input value
  std::vector<double> sse_history;  // within-cluster SSE after each assignment pass
  int iterations = 0;
};

// Lloyd's algorithm on scalars. Centroids start evenly spaced over
// [min, max]; a cluster that empties is reseeded at the value farthest from
// its current centroid. If the data has fewer distinct values than k, each
// distinct value becomes its own cluster.
inline KMeans1DResult kmeans_1d(const std::vector<double>& values, int k, int max_iters = 100,
                                double tol = 1e-9) {
  if (k < 1) throw std::invalid_argument("kmeans_1d: k must be >= 1");
  if (values.empty()) throw std::invalid_argument("kmeans_1d: no values");

  KMeans1DResult res;
  std::vector<double> distinct(values);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  if (static_cast<int>(distinct.size()) <= k) {
    res.centroids = distinct;
    res.labels.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      res.labels[i] = static_cast<int>(
          std::lower_bound(distinct.begin(), distinct.end(), values[i]) - distinct.begin());
    res.sse_history.push_back(0.0);
    return res;
  }

  const double lo = distinct.front(), hi = distinct.back();
  res.centroids.resize(k);
  for (int c = 0; c < k; ++c)
    res.centroids[c] = k == 1 ? lo : lo + (hi - lo) * static_cast<double>(c) / (k - 1);

  res.labels.assign(values.size(), 0);
  std::vector<double> cluster_sum(k);
  std::vector<std::size_t> cluster_count(k);

  for (res.iterations = 0; res.iterations < max_iters; ++res.iterations) {
    // Assignment; ties go to the lower centroid index.
    std::fill(cluster_sum.begin(), cluster_sum.end(), 0.0);
    std::fill(cluster_count.begin(), cluster_count.end(), std::size_t{0});
    double sse = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      int best = 0;
      double best_d = std::abs(values[i] - res.centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = std::abs(values[i] - res.centroids[c]);
        if (d < best_d) {
          best = c;
          best_d = d;
        }
      }
      res.labels[i] = best;
      cluster_sum[best] += values[i];
      cluster_count[best] += 1;
      sse += best_d * best_d;
    }
    res.sse_history.push_back(sse);

    // Update, with farthest-point reseeding for empty clusters.
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      double next;
      if (cluster_count[c] > 0) {
        next = cluster_sum[c] / static_cast<double>(cluster_count[c]);
      } else {
        std::size_t far_i = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
          const double d = std::abs(values[i] - res.centroids[res.labels[i]]);
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        next = values[far_i];
      }
      shift = std::max(shift, std::abs(next - res.centroids[c]));
      res.centroids[c] = next;
    }
    if (shift < tol) break;
  }
  return res;
}

// One segmented region of the field: an intensity class, not a connected
// component. Sector ids are assigned most severe first (ascending mean
// variance). severity_level is filled in by severity_observe.
struct SectorReport {
  int sector_id = 0;
  std::vector<std::pair<int, int>> cells;  // (x, y)
  double mean_variance = 0.0;
  int severity_level = -1;
};

// K-means segmentation of cell intensities. `in_field`, when given, must
// hold one byte per cell; zero bytes are excluded from every sector. The
// seed is accepted for interface stability but the evenly-spaced
// initialization makes the result seed-independent.
inline std::vector<SectorReport> segment(const GrayImage& img, int k, std::uint64_t seed = 0,
                                         const std::vector<std::uint8_t>* in_field = nullptr) {
  (void)seed;
  if (k < 1) throw std::invalid_argument("segment: k must be >= 1");
  if (img.empty()) throw std::invalid_argument("segment: empty image");
  if (in_field && in_field->size() != img.size())
    throw std::invalid_argument("segment: mask size does not match image");

  std::vector<std::size_t> cell_index;
  std::vector<double> values;
  cell_index.reserve(img.size());
  values.reserve(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (in_field && (*in_field)[i] == 0) continue;
    cell_index.push_back(i);
    values.push_back(img.data[i]);
  }
  if (values.empty()) throw std::invalid_argument("segment: mask excludes every cell");

  const KMeans1DResult km = kmeans_1d(values, k);
  const int clusters = static_cast<int>(km.centroids.size());

  std::vector<SectorReport> sectors(clusters);
  std::vector<double> sums(clusters, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int c = km.labels[i];
    const std::size_t idx = cell_index[i];
    sectors[c].cells.emplace_back(static_cast<int>(idx % img.width),
                                  static_cast<int>(idx / img.width));
    sums[c] += values[i];
  }
  sectors.erase(std::remove_if(sectors.begin(), sectors.end(),
                               [](const SectorReport& s) { return s.cells.empty(); }),
                sectors.end());
  for (SectorReport& s : sectors)
    s.mean_variance =
        std::accumulate(s.cells.begin(), s.cells.end(), 0.0,
                        [&](double acc, const std::pair<int, int>& c) {
                          return acc + img.at(c.first, c.second);
                        }) /
        static_cast<double>(s.cells.size());

  std::sort(sectors.begin(), sectors.end(), [](const SectorReport& a, const SectorReport& b) {
    if (a.mean_variance != b.mean_variance) return a.mean_variance < b.mean_variance;
    return a.cells.front() < b.cells.front();
  });
  for (std::size_t i = 0; i < sectors.size(); ++i) sectors[i].sector_id = static_cast<int>(i);
  return sectors;
}

// Uniform binning of [0,1] into `levels` bins, inverted so that the lowest
// variance lands in the highest severity level.
inline int severity_level_of(double mean_variance, int levels) {
  if (levels < 2) throw std::invalid_argument("severity: need at least 2 levels");
  int bin = static_cast<int>(mean_variance * levels);
  if (bin >= levels) bin = levels - 1;
  if (bin < 0) bin = 0;
  return levels - 1 - bin;
}

inline std::vector<std::pair<int, int>> severity_observe(const std::vector<SectorReport>& sectors,
                                                         int levels) {
  std::vector<std::pair<int, int>> out;
  out.reserve(sectors.size());
  for (const SectorReport& s : sectors)
    out.emplace_back(s.sector_id, severity_level_of(s.mean_variance, levels));
  return out;
}

// Alternative severity discretization: cluster the sector means themselves
// and rank clusters by centroid, lowest variance = highest severity.
inline std::vector<std::pair<int, int>> severity_observe_kmeans(
    const std::vector<SectorReport>& sectors, int levels) {
  if (levels < 2) throw std::invalid_argument("severity: need at least 2 levels");
  if (sectors.empty()) return {};
  std::vector<double> means;
  means.reserve(sectors.size());
  for (const SectorReport& s : sectors) means.push_back(s.mean_variance);
  const KMeans1DResult km = kmeans_1d(means, levels);

  // Rank clusters by centroid ascending; the lowest-centroid cluster gets the
  // top severity index.
  std::vector<int> order(km.centroids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return km.centroids[a] < km.centroids[b]; });
  std::vector<int> rank(km.centroids.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);

  std::vector<std::pair<int, int>> out;
  out.reserve(sectors.size());
  for (std::size_t i = 0; i < sectors.size(); ++i)
    out.emplace_back(sectors[i].sector_id, levels - 1 - rank[km.labels[i]]);
  return out;
}

inline nlohmann::json sectors_to_json(const std::vector<SectorReport>& sectors) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SectorReport& s : sectors) {
    int min_x = std::numeric_limits<int>::max(), min_y = min_x;
    int max_x = std::numeric_limits<int>::min(), max_y = max_x;
    for (const auto& [x, y] : s.cells) {
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
    arr.push_back({{"sector_id", s.sector_id},
                   {"cell_count", s.cells.size()},
                   {"mean_variance", s.mean_variance},
                   {"severity_level", s.severity_level},
                   {"bbox", {min_x, min_y, max_x, max_y}}});
  }
  return arr;
}

}  // namespace addf

#endif
