#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ovq {

constexpr int kFeatureCount = 5;
using FeatureVector = std::array<double, kFeatureCount>;

struct TrainingRow {
  FeatureVector features;
  bool positive = false;
};

// One binary decision tree stored as a flat node array. Internal nodes route
// on features[feature_index] <= threshold; leaves carry the positive-class
// fraction of their training rows.
struct TreeNode {
  int feature_index = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_posterior = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;  // node 0 is the root
  double posterior(const FeatureVector& f) const;
};

struct ForestHyperParams {
  int tree_count = 100;
  int max_depth = 12;
  int min_leaf = 5;
  int features_per_split = 2;
  std::uint64_t seed = 1;
};

struct ForestModel {
  std::vector<Tree> trees;
  ForestHyperParams config;  // training provenance
};

// Grows tree_count trees on bootstrap resamples; each split considers
// features_per_split randomly chosen features and takes the best Gini split.
// Throws on single-class data.
ForestModel train_forest(const std::vector<TrainingRow>& rows, const ForestHyperParams& hyper);

// Averaged positive-class posterior over all trees.
double forest_posterior(const ForestModel& m, const FeatureVector& f);

// Self-describing JSON with full-precision thresholds; load(save(m)) yields
// identical posteriors for every feature vector.
void save_model(const ForestModel& m, const std::string& path);
ForestModel load_model(const std::string& path);

}  // namespace ovq
