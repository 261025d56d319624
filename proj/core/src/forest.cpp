#include "ovq/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "ovq/errors.hpp"
#include "ovq/parallel.hpp"

namespace ovq {

namespace {

constexpr int kModelVersion = 1;

struct NodeStats {
  std::size_t total = 0;
  std::size_t positive = 0;
  double gini() const {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(positive) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
  }
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child Gini
  bool valid = false;
};

class TreeBuilder {
public:
  TreeBuilder(const std::vector<TrainingRow>& rows, const ForestHyperParams& hyper,
              std::uint64_t tree_seed)
      : rows_(rows), hyper_(hyper), rng_(tree_seed) {}

  Tree build() {
    std::vector<int> sample(rows_.size());
    std::uniform_int_distribution<std::size_t> pick(0, rows_.size() - 1);
    for (int& idx : sample) idx = static_cast<int>(pick(rng_));
    Tree tree;
    grow(tree, sample, 0);
    return tree;
  }

private:
  int grow(Tree& tree, std::vector<int>& indices, int depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});

    NodeStats stats;
    stats.total = indices.size();
    for (int i : indices) stats.positive += rows_[i].positive ? 1 : 0;

    const bool pure = stats.positive == 0 || stats.positive == stats.total;
    if (depth >= hyper_.max_depth || pure ||
        indices.size() < 2 * static_cast<std::size_t>(hyper_.min_leaf)) {
      make_leaf(tree.nodes[node_id], stats);
      return node_id;
    }

    const Split split = best_split(indices, stats);
    if (!split.valid) {
      make_leaf(tree.nodes[node_id], stats);
      return node_id;
    }

    std::vector<int> left, right;
    for (int i : indices) {
      (rows_[i].features[split.feature] <= split.threshold ? left : right).push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();

    tree.nodes[node_id].feature_index = split.feature;
    tree.nodes[node_id].threshold = split.threshold;
    const int l = grow(tree, left, depth + 1);
    tree.nodes[node_id].left = l;
    const int r = grow(tree, right, depth + 1);
    tree.nodes[node_id].right = r;
    return node_id;
  }

  void make_leaf(TreeNode& node, const NodeStats& stats) {
    node.feature_index = -1;
    node.left = node.right = -1;
    node.leaf_posterior =
        stats.total == 0 ? 0.0
                         : static_cast<double>(stats.positive) / static_cast<double>(stats.total);
  }

  Split best_split(const std::vector<int>& indices, const NodeStats& parent) {
    // Sample features without replacement, evaluated in ascending order for
    // deterministic tie-breaking.
    std::array<int, kFeatureCount> features;
    for (int i = 0; i < kFeatureCount; ++i) features[i] = i;
    const int tries = std::min(hyper_.features_per_split, kFeatureCount);
    for (int i = 0; i < tries; ++i) {
      std::uniform_int_distribution<int> pick(i, kFeatureCount - 1);
      std::swap(features[i], features[pick(rng_)]);
    }
    std::sort(features.begin(), features.begin() + tries);

    Split best;
    best.impurity = parent.gini();
    std::vector<std::pair<double, bool>> values;
    values.reserve(indices.size());
    for (int f = 0; f < tries; ++f) {
      const int feature = features[f];
      values.clear();
      for (int i : indices) values.emplace_back(rows_[i].features[feature], rows_[i].positive);
      std::sort(values.begin(), values.end());

      NodeStats left;
      NodeStats right = parent;
      for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        ++left.total;
        --right.total;
        if (values[k].second) {
          ++left.positive;
          --right.positive;
        }
        if (values[k].first == values[k + 1].first) continue;  // no boundary here
        if (left.total < static_cast<std::size_t>(hyper_.min_leaf) ||
            right.total < static_cast<std::size_t>(hyper_.min_leaf)) {
          continue;
        }
        const double impurity =
            (static_cast<double>(left.total) * left.gini() +
             static_cast<double>(right.total) * right.gini()) /
            static_cast<double>(parent.total);
        if (impurity < best.impurity - 1e-12) {
          best.feature = feature;
          best.threshold = 0.5 * (values[k].first + values[k + 1].first);
          best.impurity = impurity;
          best.valid = true;
        }
      }
    }
    return best;
  }

  const std::vector<TrainingRow>& rows_;
  const ForestHyperParams& hyper_;
  std::mt19937_64 rng_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double Tree::posterior(const FeatureVector& f) const {
  int node = 0;
  while (nodes[node].feature_index >= 0) {
    const TreeNode& n = nodes[node];
    node = f[n.feature_index] <= n.threshold ? n.left : n.right;
  }
  return nodes[node].leaf_posterior;
}

ForestModel train_forest(const std::vector<TrainingRow>& rows, const ForestHyperParams& hyper) {
  if (hyper.tree_count < 1) throw ArgumentError("tree_count must be >= 1");
  if (hyper.features_per_split < 1 || hyper.min_leaf < 1 || hyper.max_depth < 0) {
    throw ArgumentError("bad forest hyperparameters");
  }
  std::size_t positives = 0;
  for (const TrainingRow& r : rows) positives += r.positive ? 1 : 0;
  if (rows.empty() || positives == 0 || positives == rows.size()) {
    throw DataError("training data must contain both positive and negative rows (" +
                    std::to_string(positives) + " of " + std::to_string(rows.size()) +
                    " positive)");
  }

  ForestModel model;
  model.config = hyper;
  model.trees.resize(hyper.tree_count);
  parallel_for(static_cast<std::size_t>(hyper.tree_count),
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t t = begin; t < end; ++t) {
                   TreeBuilder builder(rows, hyper, mix_seed(hyper.seed, t));
                   model.trees[t] = builder.build();
                 }
               });
  return model;
}

double forest_posterior(const ForestModel& m, const FeatureVector& f) {
  if (m.trees.empty()) throw ArgumentError("empty forest");
  double sum = 0.0;
  for (const Tree& tree : m.trees) sum += tree.posterior(f);
  return sum / static_cast<double>(m.trees.size());
}

void save_model(const ForestModel& m, const std::string& path) {
  if (m.trees.empty()) throw ArgumentError("refusing to save an empty forest");
  nlohmann::json j;
  j["version"] = kModelVersion;
  j["tree_count"] = m.trees.size();
  j["metadata"] = {{"max_depth", m.config.max_depth},
                   {"min_leaf", m.config.min_leaf},
                   {"features_per_split", m.config.features_per_split},
                   {"seed", m.config.seed}};
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : m.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes) {
      nodes.push_back({{"feature_index", n.feature_index},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"leaf_posterior", n.leaf_posterior}});
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  j["trees"] = std::move(trees);
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model: " + path);
  out << j.dump(2) << "\n";
}

ForestModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model is not valid JSON: " + path + " (" + e.what() + ")");
  }
  try {
    if (j.at("version").get<int>() != kModelVersion) {
      throw DataError("unsupported model version in " + path);
    }
    const std::size_t tree_count = j.at("tree_count").get<std::size_t>();
    if (tree_count < 1) throw DataError("model must contain at least one tree: " + path);
    const auto& trees = j.at("trees");
    if (trees.size() != tree_count) {
      throw DataError("tree_count does not match the tree array in " + path);
    }
    ForestModel m;
    if (j.contains("metadata")) {
      const auto& meta = j["metadata"];
      m.config.max_depth = meta.value("max_depth", 0);
      m.config.min_leaf = meta.value("min_leaf", 0);
      m.config.features_per_split = meta.value("features_per_split", 0);
      m.config.seed = meta.value("seed", std::uint64_t{0});
    }
    m.config.tree_count = static_cast<int>(tree_count);
    for (const auto& jt : trees) {
      Tree tree;
      const auto& nodes = jt.at("nodes");
      if (nodes.empty()) throw DataError("empty tree in " + path);
      const int node_count = static_cast<int>(nodes.size());
      for (const auto& jn : nodes) {
        TreeNode n;
        n.feature_index = jn.at("feature_index").get<int>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
        n.leaf_posterior = jn.at("leaf_posterior").get<double>();
        if (n.feature_index >= kFeatureCount ||
            (n.feature_index >= 0 &&
             (n.left < 0 || n.left >= node_count || n.right < 0 || n.right >= node_count)) ||
            (n.feature_index < 0 && (n.leaf_posterior < 0.0 || n.leaf_posterior > 1.0))) {
          throw DataError("malformed tree node in " + path);
        }
        tree.nodes.push_back(n);
      }
      m.trees.push_back(std::move(tree));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model schema violation in " + path + ": " + e.what());
  }
}

}  // namespace ovq
