// ovq: batch objective/subjective quality assessment for omnidirectional video.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ovq/csv.hpp"
#include "ovq/dmos.hpp"
#include "ovq/errors.hpp"
#include "ovq/evaluation.hpp"
#include "ovq/forest.hpp"
#include "ovq/gaze.hpp"
#include "ovq/gmm.hpp"
#include "ovq/heatmap.hpp"
#include "ovq/metrics.hpp"
#include "ovq/parallel.hpp"
#include "ovq/scores.hpp"
#include "ovq/traces.hpp"
#include "ovq/weight_map.hpp"
#include "ovq/yuv.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitUsageError = 2;

struct WeightmapArgs {
  int width = 0, height = 0;
  int pool_width = 0, pool_height = 0;
  std::string out;
  std::string params_csv;
};

int cmd_weightmap(const WeightmapArgs& a) {
  const ovq::GmmParams params =
      a.params_csv.empty() ? ovq::default_gmm_params() : ovq::load_gmm_params(a.params_csv);
  const ovq::WeightMap map =
      ovq::ncp_weight_map(a.width, a.height, params, a.pool_width, a.pool_height);
  ovq::save_weight_map(map, a.out);
  std::cout << "wrote " << a.out << " (" << a.width << "x" << a.height << ", sum=1)\n";
  return kExitOk;
}

struct MetricArgs {
  std::string ref, dist, metric, weights, model_path, out;
  std::string params_csv;
  int width = 0, height = 0;
  std::uint64_t seed = kDefaultSeed;
  int viewport_size = 512;
  int samples = 10000;
};

// The weight map comes from --weights: "uniform", a cache path (hit when the
// file exists, computed and written on miss), or empty for an in-memory
// default-parameter map.
ovq::WeightMap resolve_weights(const MetricArgs& a, std::string& id) {
  if (a.weights == "uniform") {
    id = "uniform";
    return ovq::uniform_weight_map(a.width, a.height);
  }
  const ovq::GmmParams params =
      a.params_csv.empty() ? ovq::default_gmm_params() : ovq::load_gmm_params(a.params_csv);
  if (a.weights.empty()) {
    id = "default";
    return ovq::ncp_weight_map(a.width, a.height, params);
  }
  id = a.weights;
  if (std::filesystem::exists(a.weights)) {
    ovq::WeightMap map = ovq::load_weight_map(a.weights);
    if (map.width != a.width || map.height != a.height) {
      throw ovq::DataError("cached weight map is " + std::to_string(map.width) + "x" +
                           std::to_string(map.height) + ", expected " + std::to_string(a.width) +
                           "x" + std::to_string(a.height) + ": " + a.weights);
    }
    std::cout << "cache hit: " << a.weights << "\n";
    return map;
  }
  std::cout << "cache miss: computing " << a.weights << "\n";
  ovq::WeightMap map = ovq::ncp_weight_map(a.width, a.height, params);
  ovq::save_weight_map(map, a.weights);
  return map;
}

int cmd_metric(const MetricArgs& a) {
  const ovq::YuvFileSource ref(a.ref, a.width, a.height);
  const ovq::YuvFileSource dist(a.dist, a.width, a.height);

  ovq::SequenceScoringDeps deps;
  deps.seed = a.seed;
  ovq::WeightMap weights;
  if (a.metric != "psnr" && a.metric != "ssim") {
    weights = resolve_weights(a, deps.weight_map_id);
    deps.weights = &weights;
  }
  ovq::ForestModel model;
  if (ovq::is_cp_metric(a.metric)) {
    model = ovq::load_model(a.model_path);
    deps.model = &model;
    deps.model_id = a.model_path;
  }
  ovq::GazeConfig gaze;
  gaze.viewport_size = a.viewport_size;
  gaze.sample_count = a.samples;
  deps.gaze = &gaze;

  const ovq::MetricReport report = ovq::score_sequence(ref, dist, a.metric, deps);
  report.write_csv(a.out + ".csv");
  report.write_json(a.out + ".json");
  std::cout << a.metric << " mean " << ovq::csv::format_double(report.mean) << " over "
            << report.frame_scores.size() << " frames -> " << a.out << ".{csv,json}\n";
  return kExitOk;
}

struct TrainArgs {
  std::string manifest, traces, out;
  int trees = 100, depth = 12, min_leaf = 5, features_per_split = 2;
  std::uint64_t seed = kDefaultSeed;
  double fps = 25.0;
  int viewport_size = 512;
  int samples = 10000;
};

int cmd_train(const TrainArgs& a) {
  const ovq::Manifest manifest = ovq::load_manifest(a.manifest);
  const ovq::TraceSet traces = ovq::load_traces(a.traces);

  ovq::GazeConfig cfg;
  cfg.viewport_size = a.viewport_size;
  cfg.sample_count = a.samples;
  cfg.fps = a.fps;
  const std::vector<ovq::TrainingRow> rows =
      ovq::build_training_set(manifest, traces, a.seed, cfg);

  std::size_t positives = 0;
  for (const auto& r : rows) positives += r.positive ? 1 : 0;
  std::cout << "training rows: " << rows.size() << " (" << positives << " positive, "
            << rows.size() - positives << " negative)\n";

  ovq::ForestHyperParams hyper;
  hyper.tree_count = a.trees;
  hyper.max_depth = a.depth;
  hyper.min_leaf = a.min_leaf;
  hyper.features_per_split = a.features_per_split;
  hyper.seed = a.seed;
  const ovq::ForestModel model = ovq::train_forest(rows, hyper);
  ovq::save_model(model, a.out);
  std::cout << "trained " << model.trees.size() << " trees -> " << a.out << "\n";
  return kExitOk;
}

struct PredictArgs {
  std::string video, model_path, out;
  int width = 0, height = 0;
  std::uint64_t seed = kDefaultSeed;
  int viewport_size = 512;
  int samples = 10000;
};

int cmd_predict(const PredictArgs& a) {
  const ovq::YuvFileSource video(a.video, a.width, a.height);
  const ovq::ForestModel model = ovq::load_model(a.model_path);
  ovq::GazeConfig cfg;
  cfg.viewport_size = a.viewport_size;
  cfg.sample_count = a.samples;
  const auto trajectory = ovq::predict_trajectory(video, model, a.seed, cfg);
  ovq::save_trajectory(trajectory, a.out);
  std::cout << "predicted " << trajectory.size() << " directions -> " << a.out << "\n";
  return kExitOk;
}

struct DmosArgs {
  std::string scores, refs, traces, out;
  double f0 = 1.0 / 6.0;
  double discard_seconds = 1.0;
  std::string rejection = "per-sequence";
};

int cmd_dmos(const DmosArgs& a) {
  const ovq::ScoreTable scores = ovq::load_scores(a.scores, a.refs);
  const ovq::TraceSet traces = ovq::load_traces(a.traces);

  const ovq::SubjectTable diffs = ovq::difference_scores(scores);
  ovq::ZScoreTable z = ovq::z_scores(diffs);
  const auto population = a.rejection == "global" ? ovq::RejectionPopulation::Global
                                                  : ovq::RejectionPopulation::PerSequence;
  z = ovq::reject_subjects(z, population);
  for (const std::string& line : z.rejection_report) {
    std::cout << "rejected subject " << line << "\n";
  }
  z = ovq::rescale(z);
  const auto vdmos = ovq::v_dmos(z, traces, a.f0, a.discard_seconds);
  ovq::write_vdmos_csv(vdmos, a.out);
  std::cout << "wrote V-DMOS for " << vdmos.size() << " sequences -> " << a.out << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string objective, dmos, out;
};

std::map<std::string, double> load_sequence_values(const std::string& path,
                                                   const std::string& value_header) {
  std::ifstream in(path);
  if (!in) throw ovq::DataError("cannot open " + path);
  std::map<std::string, double> values;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string ctx = path + ":" + std::to_string(line_no);
    const auto fields = ovq::csv::split(line);
    if (!have_header) {
      if (fields.size() < 2 || fields[0] != "sequence_id" || fields[1] != value_header) {
        throw ovq::DataError(ctx + ": expected header sequence_id," + value_header);
      }
      have_header = true;
      continue;
    }
    if (fields.size() < 2) throw ovq::DataError(ctx + ": expected at least 2 fields");
    values[fields[0]] = ovq::csv::parse_double(fields[1], ctx);
  }
  if (!have_header) throw ovq::DataError(path + ": missing header");
  return values;
}

int cmd_eval(const EvalArgs& a) {
  const auto objective = load_sequence_values(a.objective, "score");
  const auto dmos = load_sequence_values(a.dmos, "o_dmos");
  const ovq::EvalStats stats = ovq::evaluate_metric(objective, dmos);
  ovq::write_eval_json(stats, a.out);
  std::cout << "srcc " << ovq::csv::format_double(stats.srcc) << " pcc "
            << ovq::csv::format_double(stats.pcc) << " rmse "
            << ovq::csv::format_double(stats.rmse) << " mae "
            << ovq::csv::format_double(stats.mae) << " -> " << a.out << "\n";
  return kExitOk;
}

struct AnalyzeArgs {
  std::string traces, traces_b, out;
  int width = 360, height = 180;
  double sigma = 10.0;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const ovq::TraceSet traces = ovq::load_traces(a.traces);
  const double rho = ovq::lonlat_correlation(traces);
  const ovq::HeatMap map_a = ovq::heatmap_from_traces(traces, a.width, a.height, a.sigma);
  ovq::write_heatmap_pgm(map_a, a.out + "_a.pgm");
  ovq::write_heatmap_f64(map_a, a.out + "_a.f64");

  std::ofstream json(a.out + ".json");
  if (!json) throw ovq::DataError("cannot write " + a.out + ".json");
  json << "{\n  \"lonlat_correlation\": " << ovq::csv::format_double(rho);
  std::cout << "lonlat correlation " << ovq::csv::format_double(rho) << "\n";

  if (!a.traces_b.empty()) {
    const ovq::TraceSet traces_b = ovq::load_traces(a.traces_b);
    const ovq::HeatMap map_b = ovq::heatmap_from_traces(traces_b, a.width, a.height, a.sigma);
    ovq::write_heatmap_pgm(map_b, a.out + "_b.pgm");
    ovq::write_heatmap_f64(map_b, a.out + "_b.f64");
    const double cc = ovq::heatmap_cc(map_a, map_b);
    json << ",\n  \"heatmap_cc\": " << ovq::csv::format_double(cc);
    std::cout << "heatmap cc " << ovq::csv::format_double(cc) << "\n";
  }
  json << "\n}\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perceptual quality assessment for omnidirectional (360) video"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: OVQ_THREADS or all cores)");

  WeightmapArgs wm;
  CLI::App* weightmap = app.add_subcommand(
      "weightmap", "Precompute and cache a non-content-based weight map");
  weightmap->add_option("--width", wm.width, "map width in pixels")->required();
  weightmap->add_option("--height", wm.height, "map height in pixels")->required();
  weightmap->add_option("--out", wm.out, "output cache file")->required();
  weightmap->add_option("--params", wm.params_csv, "GMM override CSV (axis,k,a,b,c)");
  weightmap->add_option("--pool-width", wm.pool_width, "pooling grid width (0 = auto)");
  weightmap->add_option("--pool-height", wm.pool_height, "pooling grid height (0 = auto)");

  MetricArgs me;
  CLI::App* metric = app.add_subcommand("metric", "Score a distorted sequence against its reference");
  metric->add_option("--ref", me.ref, "reference .yuv (I420)")->required();
  metric->add_option("--dist", me.dist, "distorted .yuv (I420)")->required();
  metric->add_option("--width", me.width, "frame width")->required();
  metric->add_option("--height", me.height, "frame height")->required();
  metric->add_option("--metric", me.metric, "psnr|ssim|ncp-psnr|cp-psnr|ncp-ssim|cp-ssim")
      ->required();
  metric->add_option("--weights", me.weights, "weight-map cache path, or 'uniform'");
  metric->add_option("--params", me.params_csv, "GMM override CSV");
  metric->add_option("--model", me.model_path, "trained model JSON (cp-* metrics)");
  metric->add_option("--seed", me.seed, "RNG seed (default 1)");
  metric->add_option("--viewport-size", me.viewport_size, "viewport side in pixels");
  metric->add_option("--samples", me.samples, "saliency sample count");
  metric->add_option("--out", me.out, "output basename (.csv/.json appended)")->required();

  TrainArgs tr;
  CLI::App* train = app.add_subcommand("train", "Train the viewing-direction forest (stage I)");
  train->add_option("--manifest", tr.manifest, "sequence manifest CSV")->required();
  train->add_option("--traces", tr.traces, "viewing-direction traces CSV")->required();
  train->add_option("--out", tr.out, "output model JSON")->required();
  train->add_option("--trees", tr.trees, "tree count");
  train->add_option("--depth", tr.depth, "max tree depth");
  train->add_option("--min-leaf", tr.min_leaf, "min rows per leaf");
  train->add_option("--features-per-split", tr.features_per_split, "features tried per split");
  train->add_option("--seed", tr.seed, "RNG seed (default 1)");
  train->add_option("--fps", tr.fps, "video frame rate for trace alignment");
  train->add_option("--viewport-size", tr.viewport_size, "viewport side in pixels");
  train->add_option("--samples", tr.samples, "saliency sample count");

  PredictArgs pr;
  CLI::App* predict = app.add_subcommand("predict", "Predict a viewing-direction trajectory");
  predict->add_option("--video", pr.video, "input .yuv (I420)")->required();
  predict->add_option("--width", pr.width, "frame width")->required();
  predict->add_option("--height", pr.height, "frame height")->required();
  predict->add_option("--model", pr.model_path, "trained model JSON")->required();
  predict->add_option("--out", pr.out, "output trajectory CSV")->required();
  predict->add_option("--seed", pr.seed, "RNG seed (default 1)");
  predict->add_option("--viewport-size", pr.viewport_size, "viewport side in pixels");
  predict->add_option("--samples", pr.samples, "saliency sample count");

  DmosArgs dm;
  CLI::App* dmos = app.add_subcommand("dmos", "Process subjective scores into O-DMOS/V-DMOS");
  dmos->add_option("--scores", dm.scores, "raw scores CSV")->required();
  dmos->add_option("--refs", dm.refs, "impaired-to-reference map CSV")->required();
  dmos->add_option("--traces", dm.traces, "viewing-direction traces CSV")->required();
  dmos->add_option("--out", dm.out, "output V-DMOS CSV")->required();
  dmos->add_option("--f0", dm.f0, "region frequency threshold (default 1/6)");
  dmos->add_option("--discard-seconds", dm.discard_seconds, "initial trace window to discard");
  dmos->add_option("--rejection", dm.rejection, "per-sequence|global rejection statistics")
      ->check(CLI::IsMember({"per-sequence", "global"}));

  EvalArgs ev;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate objective scores against DMOS");
  eval->add_option("--objective", ev.objective, "CSV: sequence_id,score")->required();
  eval->add_option("--dmos", ev.dmos, "CSV: sequence_id,o_dmos")->required();
  eval->add_option("--out", ev.out, "output stats JSON")->required();

  AnalyzeArgs an;
  CLI::App* analyze = app.add_subcommand("analyze", "Trace statistics and heat maps");
  analyze->add_option("--traces", an.traces, "viewing-direction traces CSV")->required();
  analyze->add_option("--traces-b", an.traces_b, "second trace CSV for heat-map CC");
  analyze->add_option("--width", an.width, "heat map width");
  analyze->add_option("--height", an.height, "heat map height");
  analyze->add_option("--sigma", an.sigma, "Gaussian kernel std in degrees");
  analyze->add_option("--out", an.out, "output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsageError;
  }

  if (threads > 0) ovq::set_thread_count(threads);

  try {
    if (weightmap->parsed()) return cmd_weightmap(wm);
    if (metric->parsed()) {
      if (!ovq::is_known_metric(me.metric)) {
        std::cerr << "unknown metric: " << me.metric << "\n";
        return kExitUsageError;
      }
      if (ovq::is_cp_metric(me.metric) && me.model_path.empty()) {
        std::cerr << me.metric << " requires --model\n";
        return kExitUsageError;
      }
      return cmd_metric(me);
    }
    if (train->parsed()) return cmd_train(tr);
    if (predict->parsed()) return cmd_predict(pr);
    if (dmos->parsed()) return cmd_dmos(dm);
    if (eval->parsed()) return cmd_eval(ev);
    if (analyze->parsed()) return cmd_analyze(an);
  } catch (const ovq::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsageError;
}
