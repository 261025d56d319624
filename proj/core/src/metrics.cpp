#include "ovq/metrics.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ovq/csv.hpp"
#include "ovq/errors.hpp"
#include "ovq/gaze.hpp"

namespace ovq {

namespace {

void check_same_shape(const Frame& ref, const Frame& dist, const WeightMap& w) {
  if (ref.width != dist.width || ref.height != dist.height) {
    throw ArgumentError("reference and distorted frame dimensions differ");
  }
  if (ref.width != w.width || ref.height != w.height) {
    throw ArgumentError("weight map dimensions do not match the frames");
  }
}

double psnr_from_weighted_mse(double wmse) {
  if (wmse < kZeroMseThreshold) return kPsnrCapDb;
  return 10.0 * std::log10(255.0 * 255.0 / wmse);
}

}  // namespace

double weighted_mse(const std::vector<std::uint8_t>& ref, const std::vector<std::uint8_t>& dist,
                    const WeightMap& w) {
  if (ref.size() != dist.size() || ref.size() != w.weights.size()) {
    throw ArgumentError("weighted_mse operand sizes differ");
  }
  double acc = 0.0;
  const std::size_t n = ref.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(ref[i]) - static_cast<double>(dist[i]);
    acc += d * d * w.weights[i];
  }
  return acc;
}

double ncp_psnr(const Frame& ref, const Frame& dist, const WeightMap& w) {
  check_same_shape(ref, dist, w);
  return psnr_from_weighted_mse(weighted_mse(ref.luma, dist.luma, w));
}

double cp_psnr(const Frame& ref, const Frame& dist, const WeightMap& ncp,
               const SphereDirection& dir) {
  const auto mask = viewport_binary_map(dir, ncp.width, ncp.height);
  return ncp_psnr(ref, dist, cp_weight_map(ncp, mask));
}

double plain_psnr(const Frame& ref, const Frame& dist) {
  if (ref.width != dist.width || ref.height != dist.height) {
    throw ArgumentError("reference and distorted frame dimensions differ");
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < ref.luma.size(); ++i) {
    const double d = static_cast<double>(ref.luma[i]) - static_cast<double>(dist.luma[i]);
    sse += d * d;
  }
  return psnr_from_weighted_mse(sse / static_cast<double>(ref.luma.size()));
}

double weighted_ssim(const Frame& ref, const Frame& dist, const WeightMap& w) {
  check_same_shape(ref, dist, w);
  const std::vector<double> map = ssim_map(ref.luma, dist.luma, ref.width, ref.height);
  double acc = 0.0;
  for (std::size_t i = 0; i < map.size(); ++i) acc += map[i] * w.weights[i];
  return acc;
}

double mean_ssim(const Frame& ref, const Frame& dist) {
  if (ref.width != dist.width || ref.height != dist.height) {
    throw ArgumentError("reference and distorted frame dimensions differ");
  }
  const std::vector<double> map = ssim_map(ref.luma, dist.luma, ref.width, ref.height);
  double acc = 0.0;
  for (double v : map) acc += v;
  return acc / static_cast<double>(map.size());
}

bool is_cp_metric(const std::string& metric) {
  return metric == "cp-psnr" || metric == "cp-ssim";
}

bool is_known_metric(const std::string& metric) {
  return metric == "psnr" || metric == "ssim" || metric == "ncp-psnr" ||
         metric == "cp-psnr" || metric == "ncp-ssim" || metric == "cp-ssim";
}

MetricReport score_sequence(const FrameSource& ref, const FrameSource& dist,
                            const std::string& metric, const SequenceScoringDeps& deps) {
  if (!is_known_metric(metric)) throw ArgumentError("unknown metric: " + metric);
  if (ref.frame_count() != dist.frame_count()) {
    throw DataError("frame count mismatch: reference has " + std::to_string(ref.frame_count()) +
                    ", distorted has " + std::to_string(dist.frame_count()));
  }
  if (ref.frame_count() == 0) throw DataError("empty sequence");
  const bool needs_weights = metric != "psnr" && metric != "ssim";
  if (needs_weights && deps.weights == nullptr) {
    throw ArgumentError(metric + " needs a weight map");
  }
  const bool cp = is_cp_metric(metric);
  if (cp && deps.model == nullptr) throw ArgumentError(metric + " needs a trained model");

  MetricReport report;
  report.metric = metric;
  report.weight_map_id = deps.weight_map_id;
  report.model_id = deps.model_id;
  report.seed = deps.seed;

  const std::size_t n = ref.frame_count();
  GazeConfig gaze = deps.gaze ? *deps.gaze : GazeConfig{};

  SphereDirection dir{0.0, 0.0};  // trajectory starts at the front center
  Frame prev_dist;
  bool have_prev = false;
  for (std::size_t t = 0; t < n; ++t) {
    const Frame rf = ref.frame(t);
    const Frame df = dist.frame(t);
    double score = 0.0;
    if (metric == "psnr") {
      score = plain_psnr(rf, df);
    } else if (metric == "ssim") {
      score = mean_ssim(rf, df);
    } else if (metric == "ncp-psnr") {
      score = ncp_psnr(rf, df, *deps.weights);
    } else if (metric == "ncp-ssim") {
      score = weighted_ssim(rf, df, *deps.weights);
    } else if (metric == "cp-psnr") {
      score = cp_psnr(rf, df, *deps.weights, dir);
    } else {  // cp-ssim
      const auto mask = viewport_binary_map(dir, deps.weights->width, deps.weights->height);
      score = weighted_ssim(rf, df, cp_weight_map(*deps.weights, mask));
    }
    report.frame_scores.push_back(score);

    if (cp && t + 1 < n) {
      const std::vector<Candidate> candidates = extract_candidates(
          df, have_prev ? &prev_dist : nullptr, dir, trajectory_step_seed(deps.seed, t), gaze);
      dir = predict_direction(*deps.model, candidates, dir);
      prev_dist = df;
      have_prev = true;
    }
  }

  double sum = 0.0;
  for (double v : report.frame_scores) sum += v;
  report.mean = sum / static_cast<double>(report.frame_scores.size());
  return report;
}

void MetricReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << "frame_index,score\n";
  for (std::size_t i = 0; i < frame_scores.size(); ++i) {
    out << i << "," << csv::format_double(frame_scores[i]) << "\n";
  }
  out << "mean," << csv::format_double(mean) << "\n";
}

void MetricReport::write_json(const std::string& path) const {
  nlohmann::json j;
  j["metric"] = metric;
  j["weight_map"] = weight_map_id;
  j["model"] = model_id;
  j["seed"] = seed;
  j["frame_scores"] = frame_scores;
  j["mean"] = mean;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ovq
