#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "addf/imaging.hpp"
#include "addf/rng.hpp"

using addf::DiffMatrix;
using addf::GrayImage;
using addf::VarianceMap;

namespace {

GrayImage random_image(int w, int h, addf::Rng& rng) {
  GrayImage img(w, h);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

// Independent block-mean: walks every output cell pixel by pixel.
GrayImage brute_block_mean(const GrayImage& img, int p) {
  const int ow = (img.width + p - 1) / p, oh = (img.height + p - 1) / p;
  GrayImage out(ow, oh);
  for (int J = 0; J < oh; ++J)
    for (int I = 0; I < ow; ++I) {
      double sum = 0.0;
      int n = 0;
      for (int y = J * p; y < std::min((J + 1) * p, img.height); ++y)
        for (int x = I * p; x < std::min((I + 1) * p, img.width); ++x) {
          sum += img.at(x, y);
          ++n;
        }
      out.at(I, J) = sum / n;
    }
  return out;
}

// Full 2-D truncated-and-normalized Gaussian sum with clamped indexing.
GrayImage brute_blur(const GrayImage& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<std::vector<double>> kernel(2 * r + 1, std::vector<double>(2 * r + 1));
  double sum = 0.0;
  for (int v = -r; v <= r; ++v)
    for (int u = -r; u <= r; ++u) {
      kernel[v + r][u + r] = std::exp(-0.5 * (u * u + v * v) / (sigma * sigma));
      sum += kernel[v + r][u + r];
    }
  const auto clampi = [](int x, int hi) { return x < 0 ? 0 : (x > hi ? hi : x); };
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int v = -r; v <= r; ++v)
        for (int u = -r; u <= r; ++u)
          acc += kernel[v + r][u + r] / sum *
                 img.at(clampi(x + u, img.width - 1), clampi(y + v, img.height - 1));
      out.at(x, y) = acc;
    }
  return out;
}

double brute_population_variance(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("approximate computes block means") {
  SECTION("constant image stays constant") {
    GrayImage img(4, 4, 0.5);
    const GrayImage out = addf::approximate(img, 2);
    REQUIRE(out.width == 2);
    REQUIRE(out.height == 2);
    for (double v : out.data) REQUIRE(v == 0.5);
  }
  SECTION("p=1 is the identity") {
    addf::Rng rng(7);
    const GrayImage img = random_image(6, 5, rng);
    const GrayImage out = addf::approximate(img, 1);
    REQUIRE(out.data == img.data);
  }
  SECTION("2x2 checkerboard collapses to its mean") {
    GrayImage img(2, 2);
    img.data = {0.0, 1.0, 1.0, 0.0};
    const GrayImage out = addf::approximate(img, 2);
    REQUIRE(out.width == 1);
    REQUIRE(out.height == 1);
    REQUIRE(out.data[0] == 0.5);
  }
  SECTION("partial edge blocks use the true population") {
    addf::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const int w = 1 + static_cast<int>(rng.below(12));
      const int h = 1 + static_cast<int>(rng.below(12));
      const int p = 1 + static_cast<int>(rng.below(5));
      const GrayImage img = random_image(w, h, rng);
      const GrayImage got = addf::approximate(img, p);
      const GrayImage want = brute_block_mean(img, p);
      REQUIRE(got.width == want.width);
      REQUIRE(got.height == want.height);
      for (std::size_t i = 0; i < got.size(); ++i)
        REQUIRE(got.data[i] == Catch::Approx(want.data[i]).margin(1e-15));
    }
  }
  SECTION("commutes with constant scaling") {
    addf::Rng rng(13);
    const GrayImage img = random_image(9, 7, rng);
    const double c = 0.37;
    GrayImage scaled = img;
    for (double& v : scaled.data) v *= c;
    const GrayImage a = addf::approximate(scaled, 3);
    GrayImage b = addf::approximate(img, 3);
    for (double& v : b.data) v *= c;
    for (std::size_t i = 0; i < a.size(); ++i)
      REQUIRE(a.data[i] == Catch::Approx(b.data[i]).margin(1e-15));
  }
  SECTION("rejects p=0 and empty images") {
    GrayImage img(2, 2, 0.1);
    REQUIRE_THROWS_AS(addf::approximate(img, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(addf::approximate(GrayImage{}, 2), std::invalid_argument);
  }
}

TEST_CASE("diff keeps only the clipped channel") {
  GrayImage a(1, 1), b(1, 1);
  SECTION("later brighter is retained") {
    a.data = {0.3};
    b.data = {0.5};
    REQUIRE(addf::diff(a, b, 1).data[0] == Catch::Approx(-0.2));
  }
  SECTION("later darker clips to zero") {
    a.data = {0.5};
    b.data = {0.3};
    REQUIRE(addf::diff(a, b, 1).data[0] == 0.0);
  }
  SECTION("identical images give the zero matrix") {
    addf::Rng rng(3);
    const GrayImage img = random_image(8, 6, rng);
    const DiffMatrix d = addf::diff(img, img, 2);
    for (double v : d.data) REQUIRE(v == 0.0);
  }
  SECTION("positive mode keeps declines, still non-positive") {
    a.data = {0.5};
    b.data = {0.3};
    REQUIRE(addf::diff(a, b, 1, addf::DiffClip::positive).data[0] == Catch::Approx(-0.2));
    a.data = {0.3};
    b.data = {0.5};
    REQUIRE(addf::diff(a, b, 1, addf::DiffClip::positive).data[0] == 0.0);
  }
  SECTION("output is never positive") {
    addf::Rng rng(5);
    const DiffMatrix d = addf::diff(random_image(10, 10, rng), random_image(10, 10, rng), 3);
    for (double v : d.data) {
      REQUIRE(v <= 0.0);
      REQUIRE(v >= -1.0);
    }
  }
  SECTION("dimension mismatch is rejected") {
    REQUIRE_THROWS_AS(addf::diff(GrayImage(2, 2, 0.1), GrayImage(3, 2, 0.1), 1),
                      std::invalid_argument);
  }
}

TEST_CASE("variance_map") {
  SECTION("fewer than two diffs give the zero map") {
    REQUIRE(addf::variance_map({}, 3, 2).data == std::vector<double>(6, 0.0));
    std::vector<DiffMatrix> one{DiffMatrix(2, 2, -0.4)};
    for (double v : addf::variance_map(one).data) REQUIRE(v == 0.0);
  }
  SECTION("identical diffs give the zero map, normalization skipped") {
    std::vector<DiffMatrix> diffs{DiffMatrix(3, 3, -0.2), DiffMatrix(3, 3, -0.2)};
    for (double v : addf::variance_map(diffs).data) REQUIRE(v == 0.0);
  }
  SECTION("hand-computed normalization") {
    // Cell 0 sees {-0.2, 0}, cell 1 sees {-0.4, 0}: population variances
    // 0.01 and 0.04, max-normalized to 0.25 and 1.0.
    DiffMatrix d0(2, 1), d1(2, 1);
    d0.data = {-0.2, -0.4};
    d1.data = {0.0, 0.0};
    const VarianceMap v = addf::variance_map({d0, d1});
    REQUIRE(v.data[0] == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(v.data[1] == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("matches the per-cell brute-force oracle exactly") {
    addf::Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const int w = 1 + static_cast<int>(rng.below(16));
      const int h = 1 + static_cast<int>(rng.below(16));
      const int n = 2 + static_cast<int>(rng.below(6));
      std::vector<DiffMatrix> diffs(n, DiffMatrix(w, h));
      for (DiffMatrix& d : diffs)
        for (double& x : d.data) x = -rng.uniform();
      const VarianceMap got = addf::variance_map(diffs);

      std::vector<double> raw(static_cast<std::size_t>(w) * h);
      for (std::size_t i = 0; i < raw.size(); ++i) {
        std::vector<double> series;
        for (const DiffMatrix& d : diffs) series.push_back(d.data[i]);
        raw[i] = brute_population_variance(series);
      }
      const double max = *std::max_element(raw.begin(), raw.end());
      for (std::size_t i = 0; i < raw.size(); ++i)
        REQUIRE(got.data[i] == (max > 0 ? raw[i] / max : raw[i]));
    }
  }
  SECTION("translation invariance") {
    addf::Rng rng(19);
    std::vector<DiffMatrix> diffs(3, DiffMatrix(4, 4));
    for (DiffMatrix& d : diffs)
      for (double& x : d.data) x = -0.5 * rng.uniform();
    std::vector<DiffMatrix> shifted = diffs;
    for (DiffMatrix& d : shifted)
      for (double& x : d.data) x -= 0.25;
    const VarianceMap a = addf::variance_map(diffs);
    const VarianceMap b = addf::variance_map(shifted);
    for (std::size_t i = 0; i < a.size(); ++i)
      REQUIRE(a.data[i] == Catch::Approx(b.data[i]).margin(1e-9));
  }
  SECTION("values in [0,1] and max exactly 1 when any variance is positive") {
    addf::Rng rng(23);
    std::vector<DiffMatrix> diffs(4, DiffMatrix(5, 5));
    for (DiffMatrix& d : diffs)
      for (double& x : d.data) x = -rng.uniform();
    const VarianceMap v = addf::variance_map(diffs);
    for (double x : v.data) {
      REQUIRE(x >= 0.0);
      REQUIRE(x <= 1.0);
    }
    REQUIRE(*std::max_element(v.data.begin(), v.data.end()) == 1.0);
  }
  SECTION("dimension mismatch is rejected") {
    std::vector<DiffMatrix> diffs{DiffMatrix(2, 2), DiffMatrix(3, 2)};
    REQUIRE_THROWS_AS(addf::variance_map(diffs), std::invalid_argument);
  }
}

TEST_CASE("gaussian_blur") {
  SECTION("a constant image is a fixed point") {
    const GrayImage out = addf::gaussian_blur(GrayImage(12, 9, 0.37), 2.5);
    for (double v : out.data) REQUIRE(v == Catch::Approx(0.37).margin(1e-12));
  }
  SECTION("interior hot pixel: mass preserved, bell symmetric") {
    GrayImage img(25, 25, 0.0);
    img.at(12, 12) = 1.0;
    const GrayImage out = addf::gaussian_blur(img, 1.0);
    double mass = 0.0;
    for (double v : out.data) mass += v;
    REQUIRE(mass == Catch::Approx(1.0).margin(1e-6));
    REQUIRE(out.at(11, 12) == Catch::Approx(out.at(13, 12)).margin(1e-15));
    REQUIRE(out.at(12, 11) == Catch::Approx(out.at(12, 13)).margin(1e-15));
    REQUIRE(out.at(12, 12) > out.at(11, 12));
  }
  SECTION("matches the direct double-sum oracle") {
    addf::Rng rng(29);
    const GrayImage img = random_image(9, 9, rng);
    for (double sigma : {0.8, 1.3, 2.5}) {
      const GrayImage got = addf::gaussian_blur(img, sigma);
      const GrayImage want = brute_blur(img, sigma);
      for (std::size_t i = 0; i < got.size(); ++i)
        REQUIRE(got.data[i] == Catch::Approx(want.data[i]).margin(1e-9));
    }
  }
  SECTION("rejects non-positive sigma") {
    REQUIRE_THROWS_AS(addf::gaussian_blur(GrayImage(3, 3, 0.1), 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(addf::gaussian_blur(GrayImage(3, 3, 0.1), -1.0), std::invalid_argument);
  }
}

TEST_CASE("kmeans_1d") {
  SECTION("well separated pairs split as expected") {
    const addf::KMeans1DResult r = addf::kmeans_1d({0.0, 0.1, 0.9, 1.0}, 2);
    REQUIRE(r.centroids.size() == 2);
    REQUIRE(r.centroids[0] == Catch::Approx(0.05));
    REQUIRE(r.centroids[1] == Catch::Approx(0.95));
    REQUIRE(r.labels == std::vector<int>{0, 0, 1, 1});
  }
  SECTION("exactly k distinct values become their own clusters") {
    const addf::KMeans1DResult r = addf::kmeans_1d({0.2, 0.8, 0.2, 0.5}, 3);
    REQUIRE(r.centroids == std::vector<double>{0.2, 0.5, 0.8});
    REQUIRE(r.labels == std::vector<int>{0, 2, 0, 1});
  }
  SECTION("k greater than distinct count degrades to one cluster per value") {
    const addf::KMeans1DResult r = addf::kmeans_1d({0.4, 0.4, 0.6}, 10);
    REQUIRE(r.centroids.size() == 2);
  }
  SECTION("k=1 collapses to the mean") {
    const addf::KMeans1DResult r = addf::kmeans_1d({0.0, 0.2, 0.7}, 1);
    REQUIRE(r.centroids.size() == 1);
    REQUIRE(r.centroids[0] == Catch::Approx(0.3));
  }
  SECTION("within-cluster SSE never increases across iterations") {
    addf::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> xs(30 + rng.below(50));
      for (double& x : xs) x = rng.uniform();
      const addf::KMeans1DResult r = addf::kmeans_1d(xs, 2 + static_cast<int>(rng.below(4)));
      for (std::size_t i = 1; i < r.sse_history.size(); ++i)
        REQUIRE(r.sse_history[i] <= r.sse_history[i - 1] + 1e-12);
    }
  }
  SECTION("rejects bad arguments") {
    REQUIRE_THROWS_AS(addf::kmeans_1d({}, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(addf::kmeans_1d({0.1}, 0), std::invalid_argument);
  }
}

TEST_CASE("segment") {
  SECTION("k matching the distinct intensities partitions by value") {
    GrayImage img(4, 1);
    img.data = {0.1, 0.9, 0.1, 0.5};
    const auto sectors = addf::segment(img, 3);
    REQUIRE(sectors.size() == 3);
    // Most severe first: lowest mean variance gets sector 0.
    REQUIRE(sectors[0].mean_variance == Catch::Approx(0.1));
    REQUIRE(sectors[0].cells.size() == 2);
    REQUIRE(sectors[1].mean_variance == Catch::Approx(0.5));
    REQUIRE(sectors[2].mean_variance == Catch::Approx(0.9));
  }
  SECTION("k=1 yields a single sector covering everything") {
    addf::Rng rng(37);
    const GrayImage img = random_image(6, 4, rng);
    const auto sectors = addf::segment(img, 1);
    REQUIRE(sectors.size() == 1);
    REQUIRE(sectors[0].cells.size() == img.size());
  }
  SECTION("masks are disjoint and cover all in-field cells") {
    addf::Rng rng(41);
    const GrayImage img = random_image(10, 8, rng);
    std::vector<std::uint8_t> field(img.size(), 1);
    for (std::size_t i = 0; i < field.size(); i += 3) field[i] = 0;
    const auto sectors = addf::segment(img, 4, 0, &field);
    std::set<std::pair<int, int>> seen;
    std::size_t covered = 0;
    for (const auto& s : sectors)
      for (const auto& cell : s.cells) {
        REQUIRE(seen.insert(cell).second);  // disjoint
        REQUIRE(field[static_cast<std::size_t>(cell.second) * img.width + cell.first] == 1);
        ++covered;
      }
    std::size_t in_field = 0;
    for (auto f : field) in_field += f;
    REQUIRE(covered == in_field);
  }
  SECTION("deterministic") {
    addf::Rng rng(43);
    const GrayImage img = random_image(12, 12, rng);
    const auto a = addf::segment(img, 5, 1);
    const auto b = addf::segment(img, 5, 2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      REQUIRE(a[i].cells == b[i].cells);
      REQUIRE(a[i].mean_variance == b[i].mean_variance);
    }
  }
  SECTION("constant image yields one full-coverage sector") {
    const auto sectors = addf::segment(GrayImage(5, 5, 0.0), 10);
    REQUIRE(sectors.size() == 1);
    REQUIRE(sectors[0].cells.size() == 25);
  }
}

TEST_CASE("severity levels") {
  SECTION("uniform binning, inverted") {
    REQUIRE(addf::severity_level_of(1.0, 3) == 0);
    REQUIRE(addf::severity_level_of(0.0, 3) == 2);
    REQUIRE(addf::severity_level_of(0.5, 5) == 2);
  }
  SECTION("antitone in mean variance") {
    addf::Rng rng(47);
    for (int trial = 0; trial < 200; ++trial) {
      const double a = rng.uniform(), b = rng.uniform();
      const int levels = 2 + static_cast<int>(rng.below(6));
      if (a <= b)
        REQUIRE(addf::severity_level_of(a, levels) >= addf::severity_level_of(b, levels));
    }
  }
  SECTION("rejects fewer than two levels") {
    REQUIRE_THROWS_AS(addf::severity_level_of(0.5, 1), std::invalid_argument);
  }
  SECTION("clustered severity ranks sector means") {
    std::vector<addf::SectorReport> sectors(3);
    sectors[0] = {0, {{0, 0}}, 0.05, -1};
    sectors[1] = {1, {{1, 0}}, 0.5, -1};
    sectors[2] = {2, {{2, 0}}, 0.95, -1};
    const auto got = addf::severity_observe_kmeans(sectors, 3);
    REQUIRE(got == std::vector<std::pair<int, int>>{{0, 2}, {1, 1}, {2, 0}});
  }
}

TEST_CASE("sector reports serialize with bbox") {
  GrayImage img(3, 2);
  img.data = {0.1, 0.1, 0.9, 0.1, 0.9, 0.9};
  auto sectors = addf::segment(img, 2);
  for (const auto& [id, level] : addf::severity_observe(sectors, 3))
    sectors[static_cast<std::size_t>(id)].severity_level = level;
  const nlohmann::json j = addf::sectors_to_json(sectors);
  REQUIRE(j.size() == 2);
  REQUIRE(j[0]["sector_id"] == 0);
  REQUIRE(j[0]["cell_count"] == 3);
  REQUIRE(j[0]["severity_level"] == 2);
  REQUIRE(j[0]["bbox"] == nlohmann::json({0, 0, 1, 1}));
  REQUIRE(j[1]["bbox"] == nlohmann::json({1, 0, 2, 1}));
}
