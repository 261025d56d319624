#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ovq/errors.hpp"
#include "ovq/metrics.hpp"

using namespace ovq;

namespace {

WeightMap random_normalized_map(int w, int h, std::uint64_t seed) {
  WeightMap m;
  m.width = w;
  m.height = h;
  m.weights.resize(static_cast<std::size_t>(w) * h);
  std::uint64_t state = seed;
  double sum = 0.0;
  for (double& v : m.weights) {
    v = 0.05 + static_cast<double>(testutil::splitmix(state) >> 11) * 0x1.0p-53;
    sum += v;
  }
  for (double& v : m.weights) v /= sum;
  m.normalized = true;
  return m;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("weighted_mse basics") {
  const Frame a = testutil::random_frame(8, 4, 3);
  CHECK(weighted_mse(a.luma, a.luma, uniform_weight_map(8, 4)) == 0.0);

  Frame b = a;
  for (auto& v : b.luma) v = static_cast<std::uint8_t>(v < 128 ? v + 2 : v - 2);
  CHECK(weighted_mse(a.luma, b.luma, uniform_weight_map(8, 4)) ==
        doctest::Approx(4.0).epsilon(1e-12));

  CHECK_THROWS_AS(weighted_mse(a.luma, b.luma, uniform_weight_map(4, 4)), ArgumentError);
}

TEST_CASE("weighted_mse equals the explicit double loop") {
  for (std::uint64_t seed : {10, 11, 12}) {
    const int w = 8, h = 8;
    const Frame a = testutil::random_frame(w, h, seed);
    const Frame b = testutil::random_frame(w, h, seed + 100);
    const WeightMap m = random_normalized_map(w, h, seed + 200);
    double expected = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double d = static_cast<double>(a.luma[y * w + x]) - b.luma[y * w + x];
        expected += d * d * m.at(x, y);
      }
    }
    CHECK(std::abs(weighted_mse(a.luma, b.luma, m) - expected) <= 1e-12 * std::max(1.0, expected));
  }
}

TEST_CASE("weighted_mse is linear in the weight map") {
  const Frame a = testutil::random_frame(16, 8, 21);
  const Frame b = testutil::random_frame(16, 8, 22);
  const WeightMap m1 = random_normalized_map(16, 8, 23);
  const WeightMap m2 = random_normalized_map(16, 8, 24);
  for (double lambda : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    WeightMap mix = m1;
    for (std::size_t i = 0; i < mix.weights.size(); ++i) {
      mix.weights[i] = lambda * m1.weights[i] + (1.0 - lambda) * m2.weights[i];
    }
    const double expected = lambda * weighted_mse(a.luma, b.luma, m1) +
                            (1.0 - lambda) * weighted_mse(a.luma, b.luma, m2);
    CHECK(weighted_mse(a.luma, b.luma, mix) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("ncp_psnr caps on identical frames and reduces to PSNR under uniform weights") {
  const Frame a = testutil::random_frame(64, 32, 31);
  CHECK(ncp_psnr(a, a, uniform_weight_map(64, 32)) == kPsnrCapDb);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Frame ref = testutil::random_frame(64, 32, 1000 + seed);
    const Frame dist = testutil::random_frame(64, 32, 2000 + seed);
    const double weighted = ncp_psnr(ref, dist, uniform_weight_map(64, 32));
    const double plain = plain_psnr(ref, dist);
    CHECK(std::abs(weighted - plain) <= 1e-6);
  }
}

TEST_CASE("ncp_psnr with a constant error field") {
  Frame ref = make_frame(32, 16, 100);
  Frame dist = make_frame(32, 16, 116);  // every pixel off by 16
  const WeightMap m = random_normalized_map(32, 16, 5);
  const double expected = 10.0 * std::log10(255.0 * 255.0 / 256.0);
  CHECK(ncp_psnr(ref, dist, m) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("PSNR family strictly decreases when errors scale up") {
  Frame ref = make_frame(32, 16, 100);
  Frame small = ref, big = ref;
  std::uint64_t state = 8;
  for (std::size_t i = 0; i < ref.luma.size(); ++i) {
    const int e = static_cast<int>(testutil::splitmix(state) % 9) - 4;  // [-4, 4]
    small.luma[i] = static_cast<std::uint8_t>(100 + e);
    big.luma[i] = static_cast<std::uint8_t>(100 + 3 * e);
  }
  CHECK(plain_psnr(ref, big) < plain_psnr(ref, small));
  const WeightMap m = ncp_weight_map(32, 16, default_gmm_params());
  CHECK(ncp_psnr(ref, big, m) < ncp_psnr(ref, small, m));
}

TEST_CASE("cp_psnr ignores distortion outside the viewport") {
  const int w = 128, h = 64;
  const WeightMap ncp = ncp_weight_map(w, h, default_gmm_params());
  const SphereDirection dir{0.0, 0.0};
  const auto mask = viewport_binary_map(dir, w, h);

  const Frame ref = make_frame(w, h, 90);
  Frame outside = ref, inside = ref;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) outside.luma[i] = 200;
    if (mask[i]) inside.luma[i] = 200;
  }
  CHECK(cp_psnr(ref, outside, ncp, dir) == kPsnrCapDb);
  CHECK(cp_psnr(ref, ref, ncp, dir) == kPsnrCapDb);
  CHECK(cp_psnr(ref, inside, ncp, dir) < ncp_psnr(ref, inside, ncp));
}

TEST_CASE("ssim_map is exactly 1 on identical frames and bounded") {
  const Frame a = testutil::random_frame(32, 16, 41);
  const auto self = ssim_map(a.luma, a.luma, 32, 16);
  for (double v : self) CHECK(v == 1.0);

  const Frame b = testutil::random_frame(32, 16, 42);
  for (double v : ssim_map(a.luma, b.luma, 32, 16)) {
    CHECK(v <= 1.0);
    CHECK(v >= -1.0);
  }

  CHECK_THROWS_AS(ssim_map(a.luma, a.luma, 8, 64), ArgumentError);
}

TEST_CASE("inverted texture scores poorly") {
  const Frame ref = testutil::random_frame(64, 32, 50);
  Frame inv = ref;
  for (auto& v : inv.luma) v = static_cast<std::uint8_t>(255 - v);
  const auto map = ssim_map(ref.luma, inv.luma, 64, 32);
  double mean = 0.0;
  for (double v : map) mean += v;
  mean /= static_cast<double>(map.size());
  CHECK(mean < 0.2);
}

TEST_CASE("weighted_ssim contracts") {
  const Frame a = testutil::random_frame(32, 16, 61);
  const WeightMap m = random_normalized_map(32, 16, 62);
  CHECK(weighted_ssim(a, a, m) == doctest::Approx(1.0).epsilon(1e-9));

  const Frame b = testutil::random_frame(32, 16, 63);
  CHECK(weighted_ssim(a, b, uniform_weight_map(32, 16)) ==
        doctest::Approx(mean_ssim(a, b)).epsilon(1e-12));

  WeightMap point;
  point.width = 32;
  point.height = 16;
  point.weights.assign(32 * 16, 0.0);
  point.weights[5 * 32 + 7] = 1.0;
  point.normalized = true;
  const auto map = ssim_map(a.luma, b.luma, 32, 16);
  CHECK(weighted_ssim(a, b, point) == doctest::Approx(map[5 * 32 + 7]).epsilon(1e-12));
}

TEST_CASE("score_sequence means and provenance") {
  std::vector<Frame> frames = {make_frame(64, 32, 10), make_frame(64, 32, 20),
                               make_frame(64, 32, 30)};
  const MemorySource ref(frames);
  const MemorySource dist(frames);
  SequenceScoringDeps deps;
  deps.seed = 77;
  deps.weight_map_id = "unused";
  const MetricReport report = score_sequence(ref, dist, "psnr", deps);
  CHECK(report.frame_scores.size() == 3);
  CHECK(report.mean == kPsnrCapDb);
  CHECK(report.seed == 77);
  CHECK(report.metric == "psnr");

  double hand_mean = 0.0;
  for (double v : report.frame_scores) hand_mean += v;
  CHECK(report.mean == doctest::Approx(hand_mean / 3.0).epsilon(1e-12));

  const MemorySource shorter(std::vector<Frame>{make_frame(64, 32, 10)});
  CHECK_THROWS_AS(score_sequence(ref, shorter, "psnr", deps), DataError);
  CHECK_THROWS_AS(score_sequence(ref, dist, "nope", deps), ArgumentError);
  CHECK_THROWS_AS(score_sequence(ref, dist, "ncp-psnr", deps), ArgumentError);  // no weights
}

}  // TEST_SUITE
