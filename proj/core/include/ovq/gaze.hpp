#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovq/forest.hpp"
#include "ovq/frame.hpp"
#include "ovq/manifest.hpp"
#include "ovq/mean_shift.hpp"
#include "ovq/saliency.hpp"
#include "ovq/sphere.hpp"
#include "ovq/traces.hpp"
#include "ovq/viewport.hpp"
#include "ovq/yuv.hpp"

namespace ovq {

struct GazeConfig {
  int viewport_size = 512;
  int sample_count = 10000;
  double bandwidth_fraction = 0.1;     // mean-shift bandwidth / viewport side
  double label_threshold_deg = 15.0;   // positive-label angular distance
  double fps = 25.0;                   // frame rate used for trace alignment
};

// A candidate viewing direction for the next frame: one salient cluster.
struct Candidate {
  SphereDirection direction;
  Point2 viewport_point;
  double spread = 0.0;  // isotropic cluster std, viewport pixels
  FeatureVector features{};
};

// n i.i.d. draws from the saliency distribution; each point is the center of
// its sampled pixel. Deterministic under a fixed seed.
std::vector<Point2> sample_points(const SaliencyMap& s, int n, std::uint64_t seed);

FeatureVector extract_features(const Candidate& c, const SaliencyMap& saliency,
                               const ViewportImage& viewport);

// Renders the viewport at `current`, detects salient clusters and maps them
// back to sphere directions. Always returns at least one candidate.
std::vector<Candidate> extract_candidates(const Frame& frame, const Frame* prev,
                                          const SphereDirection& current, std::uint64_t seed,
                                          const GazeConfig& cfg = {});

// Labeled feature rows over all (subject, frame) pairs of the manifest: the
// candidate nearest the subject's direction at t+1 is positive when within
// label_threshold_deg, every other candidate is negative.
std::vector<TrainingRow> build_training_set(const Manifest& manifest, const TraceSet& traces,
                                            std::uint64_t seed, const GazeConfig& cfg = {});

// MAP selection: the candidate with maximal averaged posterior; ties go to
// the candidate nearest `current`, then to list order.
SphereDirection predict_direction(const ForestModel& m, const std::vector<Candidate>& candidates,
                                  const SphereDirection& current);

// Closed-loop per-frame prediction starting at the front center (0,0).
std::vector<SphereDirection> predict_trajectory(const FrameSource& frames, const ForestModel& m,
                                                std::uint64_t seed, const GazeConfig& cfg = {});

std::uint64_t trajectory_step_seed(std::uint64_t seed, std::size_t frame_index);

void save_trajectory(const std::vector<SphereDirection>& trajectory, const std::string& path);

}  // namespace ovq
