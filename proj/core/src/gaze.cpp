#include "ovq/gaze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "ovq/csv.hpp"
#include "ovq/errors.hpp"

namespace ovq {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// splitmix64; uniform doubles in [0,1), portable across platforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

}  // namespace

std::uint64_t trajectory_step_seed(std::uint64_t seed, std::size_t frame_index) {
  return splitmix(seed ^ (0xA24BAED4963EE407ULL + frame_index));
}

std::vector<Point2> sample_points(const SaliencyMap& s, int n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("sample count must be >= 1");
  if (s.size <= 0 || s.values.empty()) throw ArgumentError("empty saliency map");

  std::vector<double> cdf(s.values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    acc += s.values[i];
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw ArgumentError("saliency map has zero mass");

  Rng rng(seed);
  std::vector<Point2> points;
  points.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double u = rng.next_unit() * acc;
    const std::size_t idx =
        std::min(static_cast<std::size_t>(
                     std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin()),
                 cdf.size() - 1);
    const int px = static_cast<int>(idx % s.size);
    const int py = static_cast<int>(idx / s.size);
    points.push_back({px + 0.5, py + 0.5});
  }
  return points;
}

FeatureVector extract_features(const Candidate& c, const SaliencyMap& saliency,
                               const ViewportImage& viewport) {
  const int size = viewport.size;
  const double cx = size / 2.0;
  const double cy = size / 2.0;
  const double dx = c.viewport_point.x - cx;
  const double dy = c.viewport_point.y - cy;

  FeatureVector f{};
  f[0] = std::hypot(dx, dy) / size;
  f[1] = (dx == 0.0 && dy == 0.0) ? 0.0 : std::atan2(dy, dx) * 180.0 / 3.14159265358979323846;
  f[2] = c.spread / size;

  // Mean saliency within the cluster's spread around the candidate.
  {
    const double r = std::max(c.spread, 0.5);
    const int x0 = std::clamp(static_cast<int>(std::floor(c.viewport_point.x - r)), 0, size - 1);
    const int x1 = std::clamp(static_cast<int>(std::ceil(c.viewport_point.x + r)), 0, size - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(c.viewport_point.y - r)), 0, size - 1);
    const int y1 = std::clamp(static_cast<int>(std::ceil(c.viewport_point.y + r)), 0, size - 1);
    double sum = 0.0;
    long count = 0;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double ddx = (x + 0.5) - c.viewport_point.x;
        const double ddy = (y + 0.5) - c.viewport_point.y;
        if (ddx * ddx + ddy * ddy > r * r) continue;
        sum += saliency.at(x, y);
        ++count;
      }
    }
    if (count == 0) {
      const int px = std::clamp(static_cast<int>(c.viewport_point.x), 0, size - 1);
      const int py = std::clamp(static_cast<int>(c.viewport_point.y), 0, size - 1);
      sum = saliency.at(px, py);
      count = 1;
    }
    f[3] = sum / static_cast<double>(count);
  }

  // Local intensity contrast: std of luma in a 32x32 patch, scaled to [0,1].
  {
    const int px = std::clamp(static_cast<int>(c.viewport_point.x), 0, size - 1);
    const int py = std::clamp(static_cast<int>(c.viewport_point.y), 0, size - 1);
    const int x0 = std::max(0, px - 16);
    const int x1 = std::min(size - 1, px + 15);
    const int y0 = std::max(0, py - 16);
    const int y1 = std::min(size - 1, py + 15);
    double sum = 0.0, sum2 = 0.0;
    long count = 0;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double v = viewport.luma[static_cast<std::size_t>(y) * size + x];
        sum += v;
        sum2 += v * v;
        ++count;
      }
    }
    const double mean = sum / count;
    const double var = std::max(0.0, sum2 / count - mean * mean);
    f[4] = std::sqrt(var) / 255.0;
  }
  return f;
}

std::vector<Candidate> extract_candidates(const Frame& frame, const Frame* prev,
                                          const SphereDirection& current, std::uint64_t seed,
                                          const GazeConfig& cfg) {
  const ViewportImage vp = render_viewport(frame, current, cfg.viewport_size);
  ViewportImage prev_vp;
  const ViewportImage* prev_ptr = nullptr;
  if (prev != nullptr) {
    prev_vp = render_viewport(*prev, current, cfg.viewport_size);
    prev_ptr = &prev_vp;
  }
  const SaliencyMap saliency = pqft_saliency(vp, prev_ptr);
  const std::vector<Point2> points = sample_points(saliency, cfg.sample_count, seed);
  const double bandwidth = cfg.bandwidth_fraction * cfg.viewport_size;
  const std::vector<Cluster> clusters = mean_shift(points, bandwidth);

  std::vector<Candidate> candidates;
  candidates.reserve(clusters.size());
  for (const Cluster& cluster : clusters) {
    Candidate c;
    double sx = 0.0, sy = 0.0;
    for (int i : cluster.member_indices) {
      sx += points[i].x;
      sy += points[i].y;
    }
    const double n = static_cast<double>(cluster.member_indices.size());
    c.viewport_point = {sx / n, sy / n};
    double ss = 0.0;
    for (int i : cluster.member_indices) {
      const double dx = points[i].x - c.viewport_point.x;
      const double dy = points[i].y - c.viewport_point.y;
      ss += dx * dx + dy * dy;
    }
    // Isotropic Gaussian fit; floored at half a pixel so spread stays positive
    // for single-pixel clusters.
    c.spread = std::max(std::sqrt(ss / (2.0 * n)), 0.5);
    c.direction = viewport_point_to_direction(current, cfg.viewport_size, c.viewport_point.x,
                                              c.viewport_point.y);
    c.features = extract_features(c, saliency, vp);
    candidates.push_back(std::move(c));
  }
  return candidates;
}

namespace {

// Frame index of trace sample k: floor(k * fps / sample_rate).
long frame_of_sample(long sample_index, double fps, double sample_rate) {
  return static_cast<long>(std::floor(static_cast<double>(sample_index) * fps / sample_rate));
}

struct SubjectTrace {
  std::vector<long> frames;               // aligned frame per sample, ascending
  std::vector<SphereDirection> directions;

  // Hold-last direction: the sample with the largest aligned frame <= t.
  const SphereDirection* at_frame(long t) const {
    auto it = std::upper_bound(frames.begin(), frames.end(), t);
    if (it == frames.begin()) return nullptr;
    return &directions[static_cast<std::size_t>(it - frames.begin() - 1)];
  }
  long last_frame() const { return frames.empty() ? -1 : frames.back(); }
  long first_frame() const { return frames.empty() ? -1 : frames.front(); }
};

}  // namespace

std::vector<TrainingRow> build_training_set(const Manifest& manifest, const TraceSet& traces,
                                            std::uint64_t seed, const GazeConfig& cfg) {
  if (traces.sample_rate <= 0.0) throw DataError("trace set has no sample rate");

  // subject -> sequence -> aligned samples, ordered maps for determinism
  std::map<std::string, std::map<std::string, SubjectTrace>> by_subject;
  for (const TraceRecord& r : traces.records) {
    by_subject[r.subject_id][r.sequence_id];  // create
  }
  {
    std::vector<TraceRecord> sorted = traces.records;
    std::stable_sort(sorted.begin(), sorted.end(), [](const TraceRecord& a, const TraceRecord& b) {
      return a.sample_index < b.sample_index;
    });
    for (const TraceRecord& r : sorted) {
      SubjectTrace& st = by_subject[r.subject_id][r.sequence_id];
      st.frames.push_back(frame_of_sample(r.sample_index, cfg.fps, traces.sample_rate));
      st.directions.push_back(r.direction);
    }
  }

  // Every subject in the trace set must cover every manifest sequence.
  std::vector<std::string> missing;
  if (by_subject.empty()) throw DataError("trace set is empty");
  for (const auto& [subject, sequences] : by_subject) {
    for (const SequenceEntry& seq : manifest.sequences) {
      if (sequences.count(seq.sequence_id) == 0) {
        missing.push_back(subject + "/" + seq.sequence_id);
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing (subject, sequence) trace pairs:";
    for (const std::string& id : missing) msg += " " + id;
    throw DataError(msg);
  }

  std::vector<TrainingRow> rows;
  std::uint64_t sequence_salt = 0;
  for (const SequenceEntry& seq : manifest.sequences) {
    ++sequence_salt;
    const YuvFileSource source(seq.path, seq.width, seq.height);
    const long frame_count = static_cast<long>(source.frame_count());

    std::uint64_t subject_salt = 0;
    for (const auto& [subject, sequences] : by_subject) {
      ++subject_salt;
      const auto it = sequences.find(seq.sequence_id);
      if (it == sequences.end()) continue;
      const SubjectTrace& st = it->second;

      const long t_begin = std::max(st.first_frame(), 0L);
      const long t_end = std::min(st.last_frame() - 1, frame_count - 2);
      Frame frame, prev;
      bool have_frames = false;
      for (long t = t_begin; t <= t_end; ++t) {
        const SphereDirection* here = st.at_frame(t);
        const SphereDirection* next = st.at_frame(t + 1);
        if (here == nullptr || next == nullptr) continue;
        if (!have_frames) {
          frame = source.frame(static_cast<std::size_t>(t));
          if (t > 0) prev = source.frame(static_cast<std::size_t>(t - 1));
          have_frames = true;
        } else {
          prev = std::move(frame);
          frame = source.frame(static_cast<std::size_t>(t));
        }
        const std::uint64_t step_seed =
            splitmix(seed ^ splitmix(sequence_salt * 0x100000 + subject_salt) ^
                     static_cast<std::uint64_t>(t));
        const std::vector<Candidate> candidates = extract_candidates(
            frame, (t > 0 && have_frames) ? &prev : nullptr, *here, step_seed, cfg);

        // The candidate nearest the next direction is positive when close
        // enough; everything else is negative.
        int nearest = -1;
        double nearest_dist = 1e300;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          const double d = angular_distance(candidates[c].direction, *next);
          if (d < nearest_dist) {
            nearest_dist = d;
            nearest = static_cast<int>(c);
          }
        }
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          TrainingRow row;
          row.features = candidates[c].features;
          row.positive = static_cast<int>(c) == nearest && nearest_dist <= cfg.label_threshold_deg;
          rows.push_back(row);
        }
      }
    }
  }
  return rows;
}

SphereDirection predict_direction(const ForestModel& m, const std::vector<Candidate>& candidates,
                                  const SphereDirection& current) {
  if (candidates.empty()) throw ArgumentError("no candidates to select from");
  int best = 0;
  double best_g = forest_posterior(m, candidates[0].features);
  double best_dist = angular_distance(candidates[0].direction, current);
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    const double g = forest_posterior(m, candidates[c].features);
    if (g > best_g) {
      best = static_cast<int>(c);
      best_g = g;
      best_dist = angular_distance(candidates[c].direction, current);
    } else if (g == best_g) {
      const double dist = angular_distance(candidates[c].direction, current);
      if (dist < best_dist) {
        best = static_cast<int>(c);
        best_dist = dist;
      }
    }
  }
  return candidates[best].direction;
}

std::vector<SphereDirection> predict_trajectory(const FrameSource& frames, const ForestModel& m,
                                                std::uint64_t seed, const GazeConfig& cfg) {
  if (frames.frame_count() == 0) throw ArgumentError("empty sequence");
  std::vector<SphereDirection> trajectory;
  trajectory.reserve(frames.frame_count());
  trajectory.push_back({0.0, 0.0});

  Frame prev;
  bool have_prev = false;
  for (std::size_t t = 0; t + 1 < frames.frame_count(); ++t) {
    const Frame frame = frames.frame(t);
    const std::vector<Candidate> candidates =
        extract_candidates(frame, have_prev ? &prev : nullptr, trajectory.back(),
                           trajectory_step_seed(seed, t), cfg);
    trajectory.push_back(predict_direction(m, candidates, trajectory.back()));
    prev = frame;
    have_prev = true;
  }
  return trajectory;
}

void save_trajectory(const std::vector<SphereDirection>& trajectory, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write trajectory: " + path);
  out << "frame_index,longitude_deg,latitude_deg\n";
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out << i << "," << csv::format_double(trajectory[i].longitude) << ","
        << csv::format_double(trajectory[i].latitude) << "\n";
  }
}

}  // namespace ovq
