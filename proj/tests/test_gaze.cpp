#include <doctest.h>

#include <cmath>
#include <fstream>

#include "helpers.hpp"
#include "ovq/errors.hpp"
#include "ovq/gaze.hpp"

using namespace ovq;

namespace {

GazeConfig fast_config() {
  GazeConfig cfg;
  cfg.viewport_size = 64;
  return cfg;
}

SaliencyMap uniform_saliency(int size) {
  SaliencyMap s;
  s.size = size;
  s.values.assign(static_cast<std::size_t>(size) * size, 1.0 / (size * static_cast<double>(size)));
  return s;
}

Frame dot_frame(std::uint8_t dot_value = 255, bool distractor = false) {
  Frame f = make_frame(128, 64, 60);
  testutil::paint_disc(f, {0.0, 0.0}, 2.5, dot_value);
  if (distractor) testutil::paint_disc(f, {20.0, 0.0}, 2.5, 160);
  return f;
}

ForestModel leaf_model(std::vector<double> posteriors) {
  // one leaf-only tree per posterior
  ForestModel m;
  for (double p : posteriors) m.trees.push_back({{TreeNode{-1, 0.0, -1, -1, p}}});
  return m;
}

// single tree routing feature 0 to fixed posteriors: f0 <= t1 -> p1, else
// f0 <= t2 -> p2, else p3
ForestModel routing_model(double t1, double p1, double t2, double p2, double p3) {
  Tree tree;
  tree.nodes.push_back({0, t1, 1, 2, 0.0});
  tree.nodes.push_back({-1, 0.0, -1, -1, p1});
  tree.nodes.push_back({0, t2, 3, 4, 0.0});
  tree.nodes.push_back({-1, 0.0, -1, -1, p2});
  tree.nodes.push_back({-1, 0.0, -1, -1, p3});
  ForestModel m;
  m.trees.push_back(tree);
  return m;
}

Candidate candidate_at(const SphereDirection& current, int size, double x, double y) {
  Candidate c;
  c.viewport_point = {x, y};
  c.spread = 2.0;
  c.direction = viewport_point_to_direction(current, size, x, y);
  return c;
}

}  // namespace

TEST_SUITE("gaze") {

TEST_CASE("sample_points follows the distribution") {
  SaliencyMap point_mass;
  point_mass.size = 16;
  point_mass.values.assign(256, 0.0);
  point_mass.values[5 * 16 + 9] = 1.0;
  for (const Point2& p : sample_points(point_mass, 500, 3)) {
    CHECK(p.x == 9.5);
    CHECK(p.y == 5.5);
  }

  const SaliencyMap uniform = uniform_saliency(32);
  const auto pts = sample_points(uniform, 10000, 4);
  long quadrant[4] = {0, 0, 0, 0};
  for (const Point2& p : pts) {
    quadrant[(p.y >= 16.0 ? 2 : 0) + (p.x >= 16.0 ? 1 : 0)]++;
  }
  // 4 sigma of a fair multinomial cell
  const double sigma = std::sqrt(10000 * 0.25 * 0.75);
  for (long q : quadrant) CHECK(std::abs(q - 2500.0) <= 4.0 * sigma);

  const auto again = sample_points(uniform, 10000, 4);
  REQUIRE(again.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(again[i].x == pts[i].x);
    CHECK(again[i].y == pts[i].y);
  }
}

TEST_CASE("mean_shift clusters") {
  // all points identical
  const std::vector<Point2> same(40, Point2{12.0, 7.0});
  const auto one = mean_shift(same, 5.0);
  REQUIRE(one.size() == 1);
  CHECK(one[0].mode.x == doctest::Approx(12.0).epsilon(1e-6));
  CHECK(one[0].mode.y == doctest::Approx(7.0).epsilon(1e-6));
  CHECK(one[0].member_indices.size() == 40);

  // two tight blobs ten bandwidths apart
  const double h = 4.0;
  std::vector<Point2> pts;
  std::uint64_t state = 9;
  auto unit = [&state] {
    return static_cast<double>(testutil::splitmix(state) >> 11) * 0x1.0p-53;
  };
  for (int i = 0; i < 200; ++i) pts.push_back({20.0 + (unit() - 0.5) * h, 30.0 + (unit() - 0.5) * h});
  for (int i = 0; i < 200; ++i) pts.push_back({60.0 + (unit() - 0.5) * h, 30.0 + (unit() - 0.5) * h});
  const auto blobs = mean_shift(pts, h);
  REQUIRE(blobs.size() == 2);
  CHECK(std::abs(blobs[0].mode.x - 20.0) <= h / 4.0);
  CHECK(std::abs(blobs[0].mode.y - 30.0) <= h / 4.0);
  CHECK(std::abs(blobs[1].mode.x - 60.0) <= h / 4.0);
  CHECK(std::abs(blobs[1].mode.y - 30.0) <= h / 4.0);
  CHECK(blobs[0].member_indices.size() + blobs[1].member_indices.size() == pts.size());

  // never more clusters than points
  std::vector<Point2> scatter;
  for (int i = 0; i < 25; ++i) scatter.push_back({unit() * 100.0, unit() * 100.0});
  CHECK(mean_shift(scatter, 2.0).size() <= scatter.size());

  CHECK_THROWS_AS(mean_shift({}, 1.0), ArgumentError);
  CHECK_THROWS_AS(mean_shift(same, 0.0), ArgumentError);
}

TEST_CASE("extract_candidates finds the salient spots") {
  const GazeConfig cfg = fast_config();

  const Frame dot = dot_frame();
  const auto single = extract_candidates(dot, nullptr, {0.0, 0.0}, 1, cfg);
  REQUIRE(single.size() == 1);
  CHECK(std::hypot(single[0].viewport_point.x - 32.0, single[0].viewport_point.y - 32.0) <= 5.0);
  CHECK(single[0].spread > 0.0);

  Frame two = make_frame(128, 64, 60);
  testutil::paint_disc(two, {12.0, 0.0}, 2.5, 255);
  testutil::paint_disc(two, {-12.0, 0.0}, 2.5, 255);
  const auto pair = extract_candidates(two, nullptr, {0.0, 0.0}, 7, cfg);
  REQUIRE(pair.size() == 2);
  const bool first_is_east = pair[0].direction.longitude > 0.0;
  const SphereDirection& east = first_is_east ? pair[0].direction : pair[1].direction;
  const SphereDirection& west = first_is_east ? pair[1].direction : pair[0].direction;
  CHECK(angular_distance(east, {12.0, 0.0}) <= 8.0);
  CHECK(angular_distance(west, {-12.0, 0.0}) <= 8.0);

  // determinism under a fixed seed
  const auto rerun = extract_candidates(dot, nullptr, {0.0, 0.0}, 1, cfg);
  REQUIRE(rerun.size() == single.size());
  CHECK(rerun[0].direction.longitude == single[0].direction.longitude);
  CHECK(rerun[0].features == single[0].features);
}

TEST_CASE("candidates always live inside the current viewport") {
  const GazeConfig cfg = fast_config();
  const Frame f = testutil::random_frame(128, 64, 77);
  for (const SphereDirection current : {SphereDirection{0.0, 0.0}, SphereDirection{120.0, 40.0},
                                        SphereDirection{-60.0, -70.0}}) {
    for (const Candidate& c : extract_candidates(f, nullptr, current, 3, cfg)) {
      CHECK(viewport_contains(current, c.direction));
    }
  }
}

TEST_CASE("extract_features conventions") {
  const int size = 64;
  ViewportImage vp;
  vp.size = size;
  vp.luma.assign(static_cast<std::size_t>(size) * size, 50);  // constant luma
  vp.chroma_u = vp.luma;
  vp.chroma_v = vp.luma;
  const SaliencyMap uniform = uniform_saliency(size);

  Candidate center = candidate_at({0.0, 0.0}, size, 32.0, 32.0);
  const FeatureVector f = extract_features(center, uniform, vp);
  CHECK(f[0] == 0.0);                                               // dist
  CHECK(f[1] == 0.0);                                               // angle convention
  CHECK(f[2] == doctest::Approx(2.0 / size).epsilon(1e-12));        // spread
  CHECK(f[3] == doctest::Approx(1.0 / (size * static_cast<double>(size))).epsilon(1e-12));
  CHECK(f[4] == 0.0);                                               // flat luma

  Candidate off = candidate_at({0.0, 0.0}, size, 44.0, 32.0);
  off.spread = 5.0;
  const FeatureVector g = extract_features(off, uniform, vp);
  CHECK(g[0] == doctest::Approx(12.0 / size).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-12));  // due east in image coords
  CHECK(g[3] == doctest::Approx(1.0 / (size * static_cast<double>(size))).epsilon(1e-12));
}

TEST_CASE("build_training_set labels the followed candidate") {
  testutil::TempDir tmp;
  GazeConfig cfg = fast_config();
  cfg.fps = 25.0;

  std::vector<Frame> frames(6, dot_frame(255, /*distractor=*/true));
  testutil::save_yuv(tmp.path("train.yuv"), frames);
  testutil::write_file(tmp.path("manifest.csv"),
                       "sequence_id,path,width,height,frame_count,role,reference_id\n"
                       "seq1,train.yuv,128,64,6,reference,\n");
  const Manifest manifest = load_manifest(tmp.path("manifest.csv"));

  TraceSet traces;
  traces.sample_rate = 25.0;
  testutil::append_static_trace(traces, "s1", "seq1", {0.0, 0.0}, 6);

  const auto rows = build_training_set(manifest, traces, 11, cfg);
  REQUIRE(!rows.empty());
  std::size_t positives = 0;
  double positive_dist_sum = 0.0;
  for (const TrainingRow& r : rows) {
    if (r.positive) {
      ++positives;
      positive_dist_sum += r.features[0];
    }
  }
  CHECK(positives >= 4);                       // about one per usable frame
  CHECK(positives < rows.size());              // distractor rows are negative
  CHECK(positive_dist_sum / positives < 0.1);  // positives sit near the center

  // a single-sample trace yields nothing to learn from
  TraceSet lonely;
  lonely.sample_rate = 25.0;
  lonely.records.push_back({"s1", "seq1", 0, {0.0, 0.0}});
  CHECK(build_training_set(manifest, lonely, 11, cfg).empty());

  // missing (subject, sequence) pairs are reported
  TraceSet wrong;
  wrong.sample_rate = 25.0;
  testutil::append_static_trace(wrong, "s1", "other", {0.0, 0.0}, 6);
  CHECK_THROWS_WITH_AS(build_training_set(manifest, wrong, 11, cfg),
                       doctest::Contains("s1/seq1"), DataError);
}

TEST_CASE("train_forest on separable data") {
  std::vector<TrainingRow> rows;
  std::uint64_t state = 15;
  auto unit = [&state] {
    return static_cast<double>(testutil::splitmix(state) >> 11) * 0x1.0p-53;
  };
  for (int i = 0; i < 400; ++i) {
    TrainingRow r;
    for (double& f : r.features) f = unit();
    r.positive = r.features[0] + r.features[1] > 1.0;
    rows.push_back(r);
  }
  ForestHyperParams hyper;
  hyper.tree_count = 30;
  hyper.max_depth = 8;
  hyper.min_leaf = 2;
  hyper.seed = 21;
  const ForestModel model = train_forest(rows, hyper);
  std::size_t correct = 0;
  for (const TrainingRow& r : rows) {
    correct += (forest_posterior(model, r.features) >= 0.5) == r.positive;
  }
  CHECK(static_cast<double>(correct) / rows.size() >= 0.95);

  // tiny stump separates two distinct rows (seed whose bootstrap draws both)
  std::vector<TrainingRow> two = {{{0.1, 0.1, 0.1, 0.1, 0.1}, false},
                                  {{0.9, 0.9, 0.9, 0.9, 0.9}, true}};
  ForestHyperParams stump;
  stump.tree_count = 1;
  stump.max_depth = 1;
  stump.min_leaf = 1;
  stump.features_per_split = 5;
  stump.seed = 2;
  const ForestModel s = train_forest(two, stump);
  CHECK(forest_posterior(s, two[0].features) < 0.5);
  CHECK(forest_posterior(s, two[1].features) > 0.5);

  // single-class data is an error
  std::vector<TrainingRow> mono(10, TrainingRow{{0.5, 0.5, 0.5, 0.5, 0.5}, true});
  CHECK_THROWS_AS(train_forest(mono, hyper), DataError);
}

TEST_CASE("training determinism under a fixed seed") {
  testutil::TempDir tmp;
  std::vector<TrainingRow> rows;
  std::uint64_t state = 33;
  for (int i = 0; i < 120; ++i) {
    TrainingRow r;
    for (double& f : r.features) {
      f = static_cast<double>(testutil::splitmix(state) >> 11) * 0x1.0p-53;
    }
    r.positive = r.features[2] > 0.5;
    rows.push_back(r);
  }
  ForestHyperParams hyper;
  hyper.tree_count = 12;
  hyper.seed = 4;
  save_model(train_forest(rows, hyper), tmp.path("a.json"));
  save_model(train_forest(rows, hyper), tmp.path("b.json"));
  CHECK(testutil::read_file(tmp.path("a.json")) == testutil::read_file(tmp.path("b.json")));
}

TEST_CASE("forest_posterior averages the trees") {
  CHECK(forest_posterior(leaf_model({1.0, 1.0, 1.0}), {0, 0, 0, 0, 0}) == 1.0);
  CHECK(forest_posterior(leaf_model({0.0, 1.0}), {0, 0, 0, 0, 0}) == 0.5);
  CHECK(forest_posterior(leaf_model({0.25, 0.75}), {0, 0, 0, 0, 0}) == (0.25 + 0.75) / 2.0);

  const ForestModel routed = routing_model(0.15, 0.2, 0.25, 0.9, 0.4);
  CHECK(forest_posterior(routed, {0.1, 0, 0, 0, 0}) == 0.2);
  CHECK(forest_posterior(routed, {0.2, 0, 0, 0, 0}) == 0.9);
  CHECK(forest_posterior(routed, {0.3, 0, 0, 0, 0}) == 0.4);
}

TEST_CASE("predict_direction takes the MAP candidate") {
  const SphereDirection current{0.0, 0.0};
  std::vector<Candidate> one = {candidate_at(current, 64, 40.0, 30.0)};
  const ForestModel constant = leaf_model({0.5});
  const SphereDirection single = predict_direction(constant, one, current);
  CHECK(single.longitude == one[0].direction.longitude);

  // posteriors (0.2, 0.9, 0.4) via the routing tree on feature 0
  std::vector<Candidate> three = {candidate_at(current, 64, 40.0, 32.0),
                                  candidate_at(current, 64, 20.0, 32.0),
                                  candidate_at(current, 64, 50.0, 32.0)};
  three[0].features = {0.1, 0, 0, 0, 0};
  three[1].features = {0.2, 0, 0, 0, 0};
  three[2].features = {0.3, 0, 0, 0, 0};
  const ForestModel routed = routing_model(0.15, 0.2, 0.25, 0.9, 0.4);
  const SphereDirection winner = predict_direction(routed, three, current);
  CHECK(winner.longitude == three[1].direction.longitude);

  // exact tie: nearer to the current direction wins
  std::vector<Candidate> tied = {candidate_at(current, 64, 7.0, 32.0),    // far
                                 candidate_at(current, 64, 30.0, 32.0)};  // near
  CHECK(angular_distance(tied[0].direction, current) >
        angular_distance(tied[1].direction, current));
  const SphereDirection near = predict_direction(constant, tied, current);
  CHECK(near.longitude == tied[1].direction.longitude);

  CHECK_THROWS_AS(predict_direction(constant, {}, current), ArgumentError);
}

TEST_CASE("MAP choice is invariant under monotone posterior transforms") {
  const SphereDirection current{0.0, 0.0};
  std::vector<Candidate> cands = {candidate_at(current, 64, 40.0, 32.0),
                                  candidate_at(current, 64, 20.0, 32.0),
                                  candidate_at(current, 64, 50.0, 32.0)};
  cands[0].features = {0.1, 0, 0, 0, 0};
  cands[1].features = {0.2, 0, 0, 0, 0};
  cands[2].features = {0.3, 0, 0, 0, 0};
  ForestModel base = routing_model(0.15, 0.2, 0.25, 0.9, 0.4);
  ForestModel squashed = base;
  for (Tree& tree : squashed.trees) {
    for (TreeNode& n : tree.nodes) {
      if (n.feature_index < 0) n.leaf_posterior = 0.1 + 0.5 * n.leaf_posterior;
    }
  }
  const SphereDirection a = predict_direction(base, cands, current);
  const SphereDirection b = predict_direction(squashed, cands, current);
  CHECK(a.longitude == b.longitude);
  CHECK(a.latitude == b.latitude);
}

TEST_CASE("predict_trajectory starts at the front center and is deterministic") {
  const ForestModel constant = leaf_model({0.5});
  const MemorySource one_frame(std::vector<Frame>{dot_frame()});
  const auto tiny = predict_trajectory(one_frame, constant, 1, fast_config());
  REQUIRE(tiny.size() == 1);
  CHECK(tiny[0].longitude == 0.0);
  CHECK(tiny[0].latitude == 0.0);

  const MemorySource clip(std::vector<Frame>(4, dot_frame()));
  const auto t1 = predict_trajectory(clip, constant, 42, fast_config());
  const auto t2 = predict_trajectory(clip, constant, 42, fast_config());
  REQUIRE(t1.size() == 4);
  for (std::size_t i = 0; i < t1.size(); ++i) {
    CHECK(t1[i].longitude == t2[i].longitude);
    CHECK(t1[i].latitude == t2[i].latitude);
  }
}

TEST_CASE("closed loop stays on a static salient dot") {
  testutil::TempDir tmp;
  GazeConfig cfg = fast_config();
  cfg.fps = 25.0;

  std::vector<Frame> train_frames(6, dot_frame(255, /*distractor=*/true));
  testutil::save_yuv(tmp.path("train.yuv"), train_frames);
  testutil::write_file(tmp.path("manifest.csv"),
                       "sequence_id,path,width,height,frame_count,role,reference_id\n"
                       "seq1,train.yuv,128,64,6,reference,\n");
  TraceSet traces;
  traces.sample_rate = 25.0;
  testutil::append_static_trace(traces, "s1", "seq1", {0.0, 0.0}, 6);
  testutil::append_static_trace(traces, "s2", "seq1", {0.0, 0.0}, 6);

  const auto rows = build_training_set(load_manifest(tmp.path("manifest.csv")), traces, 5, cfg);
  ForestHyperParams hyper;
  hyper.tree_count = 30;
  hyper.max_depth = 8;
  hyper.min_leaf = 2;
  hyper.seed = 5;
  const ForestModel model = train_forest(rows, hyper);

  const MemorySource clip(std::vector<Frame>(10, dot_frame(255, /*distractor=*/true)));
  const auto trajectory = predict_trajectory(clip, model, 99, cfg);
  REQUIRE(trajectory.size() == 10);
  int within = 0;
  for (const SphereDirection& d : trajectory) {
    within += angular_distance(d, {0.0, 0.0}) <= 10.0;
  }
  CHECK(within >= 9);
}

TEST_CASE("trajectory CSV output") {
  testutil::TempDir tmp;
  save_trajectory({{0.0, 0.0}, {12.5, -3.25}}, tmp.path("t.csv"));
  CHECK(testutil::read_file(tmp.path("t.csv")) ==
        "frame_index,longitude_deg,latitude_deg\n0,0,0\n1,12.5,-3.25\n");
}

}  // TEST_SUITE
