#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ovq/frame.hpp"
#include "ovq/weight_map.hpp"
#include "ovq/yuv.hpp"

namespace ovq {

struct ForestModel;
struct GazeConfig;

// PSNR-family scores are capped instead of infinite on identical frames.
constexpr double kPsnrCapDb = 100.0;
constexpr double kZeroMseThreshold = 1e-10;

// Weighted sum of squared luma differences: sum (I - I')^2 * w. The weight map
// is normalized, so no pixel-count division applies.
double weighted_mse(const std::vector<std::uint8_t>& ref, const std::vector<std::uint8_t>& dist,
                    const WeightMap& w);

double ncp_psnr(const Frame& ref, const Frame& dist, const WeightMap& w);

// NCP-PSNR under the content-based weight map of the given viewing direction.
double cp_psnr(const Frame& ref, const Frame& dist, const WeightMap& ncp,
               const SphereDirection& dir);

double plain_psnr(const Frame& ref, const Frame& dist);

// Local SSIM per pixel (11x11 Gaussian window, sigma 1.5, K1=0.01, K2=0.03),
// symmetric-padded so the map covers the full frame. Frames must be >= 11x11.
std::vector<double> ssim_map(const std::vector<std::uint8_t>& ref,
                             const std::vector<std::uint8_t>& dist, int width, int height);

// Serves NCP-SSIM and CP-SSIM: sum of the SSIM map times the weight map.
double weighted_ssim(const Frame& ref, const Frame& dist, const WeightMap& w);

double mean_ssim(const Frame& ref, const Frame& dist);

struct MetricReport {
  std::string metric;
  std::vector<double> frame_scores;
  double mean = 0.0;
  // Config echo for provenance.
  std::string weight_map_id;
  std::string model_id;
  std::uint64_t seed = 0;

  void write_csv(const std::string& path) const;
  void write_json(const std::string& path) const;
};

struct SequenceScoringDeps {
  const WeightMap* weights = nullptr;       // required by ncp-*/cp-*
  const ForestModel* model = nullptr;       // required by cp-*
  const GazeConfig* gaze = nullptr;         // cp-* trajectory settings
  std::uint64_t seed = 0;
  std::string weight_map_id;
  std::string model_id;
};

// Per-frame scores plus their arithmetic mean. Metric is one of
// psnr, ssim, ncp-psnr, cp-psnr, ncp-ssim, cp-ssim. CP metrics predict one
// viewing-direction trajectory over the distorted sequence and score frame t
// at direction[t].
MetricReport score_sequence(const FrameSource& ref, const FrameSource& dist,
                            const std::string& metric, const SequenceScoringDeps& deps);

bool is_cp_metric(const std::string& metric);
bool is_known_metric(const std::string& metric);

}  // namespace ovq
