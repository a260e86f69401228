/*
 * Copyright 2026 The polargrid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "polargrid/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "polargrid/augment.hpp"
#include "polargrid/error.hpp"
#include "polargrid/metrics.hpp"
#include "polargrid/partition_stats.hpp"
#include "polargrid/rng.hpp"

namespace polargrid {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kTrainScanSalt = 0x747261696e000000ull;
constexpr std::uint64_t kEvalScanSalt = 0x6576616c00000000ull;
constexpr std::uint64_t kAugmentSalt = 0x6175670000000000ull;
constexpr std::array<GridKind, 3> kAllKinds = {
    GridKind::kCartesian, GridKind::kPolar, GridKind::kSpherical};

std::string SequenceId(int seq) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d", seq);
  return buf;
}

std::string ScanStem(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06zu", index);
  return buf;
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * v);
  return buf;
}

std::string Fixed(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path.string());
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Results are
// written by index, so callers merge them in a fixed order.
void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <typename T>
std::vector<T> MapScans(const DatasetSplit& split, int threads,
                        const std::function<T(const Scan&, std::size_t)>& fn) {
  std::vector<T> out(split.size());
  ParallelFor(split.size(), threads,
              [&](std::size_t i) { out[i] = fn(split.load(i), i); });
  return out;
}

std::vector<fs::path> ListFiles(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) Fail(ErrorCode::kIo, "missing directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

DatasetSplit KittiSplit(const ExperimentConfig& config, const std::vector<int>& seqs,
                        const LabelMap& map) {
  DatasetSplit split;
  std::vector<fs::path> scans;
  std::vector<fs::path> labels;
  for (int seq : seqs) {
    const fs::path base = fs::path(config.root) / "sequences" / SequenceId(seq);
    // Absent sequences leave the split short; commands that need the split
    // reject it when empty.
    if (!fs::is_directory(base / "velodyne")) continue;
    auto files = ListFiles(base / "velodyne", ".bin");
    if (config.max_scans > 0 && files.size() > static_cast<std::size_t>(config.max_scans)) {
      files.resize(config.max_scans);
    }
    for (const auto& f : files) {
      split.sequence.push_back(SequenceId(seq));
      split.stem.push_back(f.stem().string());
      scans.push_back(f);
      labels.push_back(base / "labels" / (f.stem().string() + ".label"));
    }
  }
  split.load = [scans, labels, map](std::size_t i) {
    Scan scan = LoadScan(scans[i].string());
    if (fs::exists(labels[i])) {
      scan.labels = LoadLabels(labels[i].string(), map, scan.size());
    }
    return scan;
  };
  return split;
}

DatasetSplit SynthSplit(const SynthSpec& spec, std::uint64_t seed,
                        std::uint64_t salt, int count, const std::string& seq) {
  DatasetSplit split;
  for (int i = 0; i < count; ++i) {
    split.sequence.push_back(seq);
    split.stem.push_back(ScanStem(i));
  }
  split.load = [spec, seed, salt](std::size_t i) {
    return GenerateSyntheticScan(spec, SplitMix64(seed ^ SplitMix64(salt + i)));
  };
  return split;
}

SynthSpec LoadSynthSpec(const ExperimentConfig& config) {
  return config.synth_spec.empty() ? SynthSpec::Default()
                                   : SynthSpec::FromFile(config.synth_spec);
}

std::vector<std::int64_t> ClassCounts(const DatasetSplit& split, int num_classes,
                                      int threads) {
  auto per_scan = MapScans<std::vector<std::int64_t>>(
      split, threads, [num_classes](const Scan& scan, std::size_t) {
        std::vector<std::int64_t> counts(num_classes, 0);
        for (ClassId c : scan.label_vector()) ++counts[c];
        return counts;
      });
  std::vector<std::int64_t> total(num_classes, 0);
  for (const auto& counts : per_scan) {
    for (int c = 0; c < num_classes; ++c) total[c] += counts[c];
  }
  return total;
}

struct EvalResult {
  ConfusionMatrix matrix;
  std::vector<DistanceBucket> buckets;
};

struct ScanScore {
  ConfusionMatrix matrix;
  std::vector<DistanceBucket> buckets;
};

ScanScore ScoreScan(const Scan& scan, std::span<const ClassId> pred,
                    const LabelMap& map, const std::vector<double>& edges) {
  ScanScore score{ConfusionMatrix(map.num_classes(), map.ignore()), {}};
  score.matrix.Accumulate(scan.label_vector(), pred);
  score.buckets = DistanceBinnedConfusion(scan.label_vector(), pred, scan.points,
                                          edges, map.num_classes(), map.ignore());
  return score;
}

EvalResult MergeScores(const std::vector<ScanScore>& scores, const LabelMap& map) {
  EvalResult result{ConfusionMatrix(map.num_classes(), map.ignore()), {}};
  for (const auto& s : scores) {
    result.matrix += s.matrix;
    MergeBuckets(result.buckets, s.buckets);
  }
  return result;
}

std::string WriteMetrics(const fs::path& dir, const std::string& prefix,
                         const EvalResult& result, const LabelMap& map) {
  WriteText(dir / (prefix + "iou.csv"), IouCsv(result.matrix, map.names()));
  WriteText(dir / (prefix + "distance_miou.csv"), DistanceCsv(result.buckets));
  std::string summary = "miou,accuracy\n";
  if (result.matrix.total() > 0) {
    summary += Fixed(result.matrix.MeanIou()) + "," + Fixed(result.matrix.Accuracy()) + "\n";
  }
  WriteText(dir / (prefix + "summary.csv"), summary);
  return IouTable(result.matrix, map.names());
}

void RequireScans(const DatasetSplit& split, const char* what) {
  Require(split.size() > 0, ErrorCode::kIo,
          std::string(what) + " split has no scans");
}

class Runner {
 public:
  explicit Runner(const ExperimentConfig& config)
      : config_(config), out_(config.out) {}

  std::string Run(const std::string& command) {
    config_.Validate();
    EnsureDirectory(out_);
    WriteText(out_ / "config.ini", config_.ToConfig().ToString());
    if (command == "synth") return Synth();
    data_ = OpenDataset(config_);
    if (command == "stats") return Stats();
    if (command == "purity") return Purity();
    if (command == "upper-bound") return UpperBound();
    if (command == "train") return Train();
    if (command == "eval") return Eval();
    if (command == "predict") return Predict();
    if (command == "compare") return Compare();
    Fail(ErrorCode::kInvalidArgument, "unknown command '" + command + "'");
  }

 private:
  std::string Synth() {
    Require(config_.source == "synth", ErrorCode::kConfig,
            "synth: data.source must be 'synth'");
    const SynthSpec spec = LoadSynthSpec(config_);
    Dataset data = OpenDataset(config_);
    std::size_t points = 0;
    auto dump = [&](const DatasetSplit& split) {
      const fs::path seq = out_ / "sequences" / split.sequence.front();
      EnsureDirectory(seq / "velodyne");
      EnsureDirectory(seq / "labels");
      auto sizes = MapScans<std::size_t>(split, config_.threads,
                                         [&](const Scan& scan, std::size_t i) {
        WriteScan(scan, (seq / "velodyne" / (split.stem[i] + ".bin")).string());
        WritePredictions(scan.label_vector(), data.label_map,
                         (seq / "labels" / (split.stem[i] + ".label")).string());
        return scan.size();
      });
      for (auto n : sizes) points += n;
    };
    if (data.train.size() > 0) dump(data.train);
    if (data.eval.size() > 0) dump(data.eval);
    data.label_map.ToConfig().WriteFile((out_ / "label_map.ini").string());
    spec.ToConfig().WriteFile((out_ / "synth_spec.ini").string());
    std::ostringstream report;
    report << "wrote " << data.train.size() << " train + " << data.eval.size()
           << " eval scans (" << points << " points) to " << out_.string() << "\n";
    return report.str();
  }

  std::string Stats() {
    const auto& split = data_.eval;
    RequireScans(split, "eval");
    const auto edges =
        LogSpacedEdges(config_.stats_min, config_.stats_max, config_.stats_bins);
    std::ostringstream report;
    std::string summary = "kind,cells,mean,std\n";
    report << "points per 2D cell (" << split.size() << " scans)\n";
    for (GridKind kind : kAllKinds) {
      const GridSpec spec = config_.grid(kind);
      auto per_scan = MapScans<OccupancyStats>(
          split, config_.threads, [&](const Scan& scan, std::size_t) {
            return PointsPerCellStats(Quantize(scan, spec), edges);
          });
      OccupancyStats total = per_scan.front();
      for (std::size_t s = 1; s < per_scan.size(); ++s) total += per_scan[s];
      std::string csv = "bin_center_m,mean,std\n";
      for (std::size_t b = 0; b < total.buckets.size(); ++b) {
        if (total.buckets[b].cells == 0) continue;
        csv += Fixed(total.bucket_center(b), 4) + "," + Fixed(total.buckets[b].mean()) +
               "," + Fixed(total.buckets[b].stddev()) + "\n";
      }
      WriteText(out_ / (std::string("stats_") + GridKindName(kind) + ".csv"), csv);
      summary += std::string(GridKindName(kind)) + "," +
                 std::to_string(spec.num_cells_2d()) + "," +
                 Fixed(total.global.mean()) + "," + Fixed(total.global.stddev()) + "\n";
      report << "  " << GridKindName(kind) << ": " << Fixed(total.global.mean(), 3)
             << " +- " << Fixed(total.global.stddev(), 3) << "\n";
    }
    WriteText(out_ / "stats_summary.csv", summary);
    return report.str();
  }

  std::string Purity() {
    const auto& split = data_.eval;
    RequireScans(split, "eval");
    std::ostringstream report;
    std::string csv = "kind,purity\n";
    report << "voxel purity (" << split.size() << " scans)\n";
    for (GridKind kind : kAllKinds) {
      const GridSpec spec = config_.grid(kind);
      auto per_scan = MapScans<PurityCounts>(
          split, config_.threads, [&](const Scan& scan, std::size_t) {
            return CountPurity(Quantize(scan, spec), scan.label_vector(),
                               data_.label_map.ignore());
          });
      PurityCounts total;
      for (const auto& p : per_scan) total += p;
      csv += std::string(GridKindName(kind)) + "," + Fixed(total.purity()) + "\n";
      report << "  " << GridKindName(kind) << ": " << Percent(total.purity()) << "\n";
    }
    WriteText(out_ / "purity.csv", csv);
    return report.str();
  }

  std::string UpperBound() {
    const auto& split = data_.eval;
    RequireScans(split, "eval");
    std::ostringstream report;
    std::string csv = "kind,miou,accuracy\n";
    report << "upper-bound mIoU (" << split.size() << " scans)\n";
    for (GridKind kind : kAllKinds) {
      const GridSpec spec = config_.grid(kind);
      auto scores = MapScans<ScanScore>(
          split, config_.threads, [&](const Scan& scan, std::size_t) {
            const auto pred = UpperBoundLabels(Quantize(scan, spec), scan.label_vector(),
                                               data_.label_map.ignore());
            return ScoreScan(scan, pred, data_.label_map, config_.distance_edges);
          });
      const EvalResult result = MergeScores(scores, data_.label_map);
      WriteMetrics(out_, std::string("upper_bound_") + GridKindName(kind) + "_", result,
                   data_.label_map);
      csv += std::string(GridKindName(kind)) + "," + Fixed(result.matrix.MeanIou()) +
             "," + Fixed(result.matrix.Accuracy()) + "\n";
      report << "  " << GridKindName(kind) << ": mIoU " << Percent(result.matrix.MeanIou())
             << ", accuracy " << Percent(result.matrix.Accuracy()) << "\n";
    }
    WriteText(out_ / "upper_bound.csv", csv);
    return report.str();
  }

  Segmenter MakeModel(GridKind kind) const {
    return Segmenter(config_.ModelConfig(kind, data_.label_map.num_classes(),
                                         data_.label_map.ignore()),
                     config_.seed);
  }

  std::vector<PreparedScan> PrepareSplit(const Segmenter& model,
                                         const DatasetSplit& split) const {
    return MapScans<PreparedScan>(split, config_.threads,
                                  [&](const Scan& scan, std::size_t) {
                                    return model.Prepare(scan);
                                  });
  }

  // Trains in place and writes <prefix>loss_log.csv.
  std::string TrainModel(Segmenter& model, const std::string& prefix) {
    RequireScans(data_.train, "train");
    std::vector<double> weights;
    if (config_.class_weighting) {
      const auto counts = ClassCounts(data_.train, data_.label_map.num_classes(),
                                      config_.threads);
      weights = InverseLogFrequencyWeights(counts, data_.label_map.ignore());
    }
    std::vector<PreparedScan> prepared;
    std::vector<Scan> raw;
    if (config_.flip_augment) {
      raw = MapScans<Scan>(data_.train, config_.threads,
                           [](const Scan& scan, std::size_t) { return scan; });
    } else {
      prepared = PrepareSplit(model, data_.train);
    }
    SgdOptimizer optimizer(config_.learning_rate, config_.momentum,
                           config_.weight_decay);
    const std::size_t n = data_.train.size();
    std::string log = "step,loss,voxel_accuracy\n";
    std::ostringstream report;
    for (int step = 0; step < config_.steps; ++step) {
      std::vector<PreparedScan> batch;
      for (int b = 0; b < config_.batch; ++b) {
        const std::size_t idx =
            (static_cast<std::size_t>(step) * config_.batch + b) % n;
        if (config_.flip_augment) {
          std::mt19937_64 rng = StreamFor(
              config_.seed, kAugmentSalt + static_cast<std::uint64_t>(step) * config_.batch + b);
          batch.push_back(model.Prepare(FlipAugment(raw[idx], rng)));
        } else {
          batch.push_back(prepared[idx]);
        }
      }
      const TrainStepResult r = model.TrainStep(batch, optimizer, weights);
      const double acc = r.counted_voxels
                             ? static_cast<double>(r.correct_voxels) / r.counted_voxels
                             : 0.0;
      log += std::to_string(step) + "," + Fixed(r.loss, 9) + "," + Fixed(acc) + "\n";
      if (config_.log_every > 0 &&
          (step % config_.log_every == 0 || step + 1 == config_.steps)) {
        report << "  step " << step << "  loss " << Fixed(r.loss, 5) << "  voxel acc "
               << Percent(acc) << "\n";
      }
    }
    WriteText(out_ / (prefix + "loss_log.csv"), log);
    return report.str();
  }

  EvalResult EvaluateModel(Segmenter& model) {
    RequireScans(data_.eval, "eval");
    std::vector<ScanScore> scores(data_.eval.size());
    for (std::size_t i = 0; i < data_.eval.size(); ++i) {
      const PreparedScan prepared = model.Prepare(data_.eval.load(i));
      const auto pred = model.Predict(prepared);
      scores[i] = ScoreScan(prepared.scan, pred, data_.label_map, config_.distance_edges);
    }
    return MergeScores(scores, data_.label_map);
  }

  std::string CheckpointPath() const {
    return config_.checkpoint.empty() ? (out_ / "model.ckpt").string()
                                      : config_.checkpoint;
  }

  std::string Train() {
    Segmenter model = MakeModel(config_.grid_kind);
    std::ostringstream report;
    report << "training " << GridKindName(config_.grid_kind) << " model for "
           << config_.steps << " steps\n";
    report << TrainModel(model, "");
    // Metadata leaves out where the run was written so that identical runs
    // produce identical checkpoints.
    ExperimentConfig portable = config_;
    portable.out = ".";
    portable.checkpoint.clear();
    portable.predictions.clear();
    model.Save((out_ / "model.ckpt").string(), portable.ToConfig().ToString());
    const EvalResult result = EvaluateModel(model);
    report << WriteMetrics(out_, "", result, data_.label_map);
    return report.str();
  }

  std::string Eval() {
    std::vector<ScanScore> scores(data_.eval.size());
    RequireScans(data_.eval, "eval");
    if (!config_.predictions.empty()) {
      for (std::size_t i = 0; i < data_.eval.size(); ++i) {
        const Scan scan = data_.eval.load(i);
        const fs::path file = fs::path(config_.predictions) / "sequences" /
                              data_.eval.sequence[i] / "predictions" /
                              (data_.eval.stem[i] + ".label");
        const auto pred = LoadLabels(file.string(), data_.label_map, scan.size());
        scores[i] = ScoreScan(scan, pred, data_.label_map, config_.distance_edges);
      }
      return WriteMetrics(out_, "", MergeScores(scores, data_.label_map),
                          data_.label_map);
    }
    Segmenter model = MakeModel(config_.grid_kind);
    model.Load(CheckpointPath());
    return WriteMetrics(out_, "", EvaluateModel(model), data_.label_map);
  }

  std::string Predict() {
    Segmenter model = MakeModel(config_.grid_kind);
    model.Load(CheckpointPath());
    for (std::size_t i = 0; i < data_.eval.size(); ++i) {
      const PreparedScan prepared = model.Prepare(data_.eval.load(i));
      const auto pred = model.Predict(prepared);
      const fs::path dir = out_ / "sequences" / data_.eval.sequence[i] / "predictions";
      EnsureDirectory(dir);
      WritePredictions(pred, data_.label_map, (dir / (data_.eval.stem[i] + ".label")).string());
    }
    return "wrote " + std::to_string(data_.eval.size()) + " prediction files under " +
           (out_ / "sequences").string() + "\n";
  }

  std::string Compare() {
    double average_points = 0.0;
    if (data_.train.size() > 0) {
      const auto sizes = MapScans<std::size_t>(
          data_.train, config_.threads,
          [](const Scan& scan, std::size_t) { return scan.size(); });
      for (auto s : sizes) average_points += static_cast<double>(s);
      average_points /= static_cast<double>(sizes.size());
    }
    std::ostringstream report;
    std::string csv = "kind,miou,accuracy,params,macs\n";
    for (GridKind kind : {GridKind::kPolar, GridKind::kCartesian, GridKind::kSpherical}) {
      const std::string name = GridKindName(kind);
      Segmenter model = MakeModel(kind);
      report << "[" << name << "]\n" << TrainModel(model, "compare_" + name + "_");
      const EvalResult result = EvaluateModel(model);
      WriteMetrics(out_, "compare_" + name + "_", result, data_.label_map);
      const CostSummary cost = model.Cost(average_points);
      const double miou = result.matrix.total() ? result.matrix.MeanIou() : 0.0;
      const double acc = result.matrix.total() ? result.matrix.Accuracy() : 0.0;
      csv += name + "," + Fixed(miou) + "," + Fixed(acc) + "," + std::to_string(cost.params) +
             "," + Fixed(cost.macs, 0) + "\n";
    }
    WriteText(out_ / "compare.csv", csv);
    report << "\n" << "kind        mIoU      accuracy  params      MACs\n";
    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
      std::vector<std::string> f = SplitList(line);
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%-10s  %-8s  %-8s  %-10s  %.3g\n", f[0].c_str(),
                    Percent(std::stod(f[1])).c_str(), Percent(std::stod(f[2])).c_str(),
                    f[3].c_str(), std::stod(f[4]));
      report << buf;
    }
    return report.str();
  }

  ExperimentConfig config_;
  fs::path out_;
  Dataset data_;
};

}  // namespace

ExperimentConfig ExperimentConfig::Default() {
  ExperimentConfig c;
  c.polar = GridSpec::Polar({3.0, 50.0}, {-3.0, 1.5}, 64, 96, 8);
  c.cartesian = GridSpec::Cartesian({-50.0, 50.0}, {-50.0, 50.0}, {-3.0, 1.5}, 64, 96, 8);
  c.spherical = GridSpec::Spherical({-25.0 * std::numbers::pi / 180.0,
                                     3.0 * std::numbers::pi / 180.0},
                                    64, 96);
  return c;
}

namespace {

// Typos would otherwise fall back to defaults without a word.
void RejectUnknownKeys(const KeyValueConfig& kv) {
  static const KeyValueConfig known = ExperimentConfig::Default().ToConfig();
  static const std::vector<std::string> grid_keys = {"kind", "x",          "y",    "z",
                                                     "radius", "zenith_deg", "cells"};
  for (const auto& section : kv.sections()) {
    const bool grid_section = section.name.rfind("grid.", 0) == 0;
    Require(known.FindSection(section.name) != nullptr, ErrorCode::kConfig,
            "unknown config section [" + section.name + "]");
    for (const auto& entry : section.entries) {
      const bool ok = grid_section ? std::find(grid_keys.begin(), grid_keys.end(),
                                               entry.first) != grid_keys.end()
                                   : known.Has(section.name, entry.first);
      Require(ok, ErrorCode::kConfig,
              "unknown config key " + section.name + "." + entry.first);
    }
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::FromConfig(const KeyValueConfig& kv) {
  ExperimentConfig c = Parse(kv);
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::Parse(const KeyValueConfig& kv) {
  RejectUnknownKeys(kv);
  ExperimentConfig c = Default();
  c.source = kv.GetString("data", "source", c.source);
  c.root = kv.GetString("data", "root", c.root);
  c.label_map = kv.GetString("data", "label_map", c.label_map);
  c.train_sequences = kv.GetIntList("data", "train_sequences", c.train_sequences);
  c.eval_sequences = kv.GetIntList("data", "eval_sequences", c.eval_sequences);
  c.max_scans = static_cast<int>(kv.GetInt("data", "max_scans", c.max_scans));
  c.synth_spec = kv.GetString("data", "synth_spec", c.synth_spec);
  c.train_scans = static_cast<int>(kv.GetInt("data", "train_scans", c.train_scans));
  c.eval_scans = static_cast<int>(kv.GetInt("data", "eval_scans", c.eval_scans));

  c.grid_kind = ParseGridKind(kv.GetString("grid", "kind", GridKindName(c.grid_kind)));
  auto read_grid = [&kv](const std::string& section, GridSpec fallback) {
    if (kv.FindSection(section) == nullptr) return fallback;
    KeyValueConfig merged;
    fallback.ToConfig(merged, section);
    for (const auto& [key, value] : kv.FindSection(section)->entries) {
      merged.Set(section, key, value);
    }
    return GridSpec::FromConfig(merged, section);
  };
  c.cartesian = read_grid("grid.cartesian", c.cartesian);
  c.polar = read_grid("grid.polar", c.polar);
  c.spherical = read_grid("grid.spherical", c.spherical);

  c.encoder_widths = kv.GetIntList("encoder", "widths", c.encoder_widths);
  c.normalize_features = kv.GetBool("encoder", "normalize", c.normalize_features);
  c.channels = kv.GetIntList("network", "channels", c.channels);
  c.kernel = static_cast<int>(kv.GetInt("network", "kernel", c.kernel));

  c.ring_conv = kv.GetBool("ablation", "ring_conv", c.ring_conv);
  c.nine_features = kv.GetBool("ablation", "nine_features", c.nine_features);
  c.flip_augment = kv.GetBool("ablation", "flip_augment", c.flip_augment);
  c.fixed_volume = kv.GetBool("ablation", "fixed_volume", c.fixed_volume);
  c.tuned_grid = kv.GetBool("ablation", "tuned_grid", c.tuned_grid);
  c.untuned_cells = kv.GetIntList("ablation", "untuned_cells", c.untuned_cells);

  c.steps = static_cast<int>(kv.GetInt("train", "steps", c.steps));
  c.learning_rate = kv.GetDouble("train", "learning_rate", c.learning_rate);
  c.momentum = kv.GetDouble("train", "momentum", c.momentum);
  c.weight_decay = kv.GetDouble("train", "weight_decay", c.weight_decay);
  c.batch = static_cast<int>(kv.GetInt("train", "batch", c.batch));
  c.class_weighting = kv.GetBool("train", "class_weighting", c.class_weighting);
  c.log_every = static_cast<int>(kv.GetInt("train", "log_every", c.log_every));

  c.distance_edges = kv.GetDoubleList("eval", "distance_edges", c.distance_edges);
  c.stats_bins = static_cast<int>(kv.GetInt("eval", "stats_bins", c.stats_bins));
  c.stats_min = kv.GetDouble("eval", "stats_min", c.stats_min);
  c.stats_max = kv.GetDouble("eval", "stats_max", c.stats_max);
  c.checkpoint = kv.GetString("eval", "checkpoint", c.checkpoint);
  c.predictions = kv.GetString("eval", "predictions", c.predictions);

  const long long seed = kv.GetInt("run", "seed", static_cast<long long>(c.seed));
  Require(seed >= 0, ErrorCode::kConfig, "run.seed must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.out = kv.GetString("run", "out", c.out);
  c.threads = static_cast<int>(kv.GetInt("run", "threads", c.threads));
  return c;
}

ExperimentConfig ExperimentConfig::FromFile(const std::string& path) {
  return FromConfig(KeyValueConfig::FromFile(path));
}

KeyValueConfig ExperimentConfig::ToConfig() const {
  KeyValueConfig kv;
  kv.Set("data", "source", source);
  kv.Set("data", "root", root);
  kv.Set("data", "label_map", label_map);
  kv.Set("data", "train_sequences", JoinInts(train_sequences));
  kv.Set("data", "eval_sequences", JoinInts(eval_sequences));
  kv.Set("data", "max_scans", std::to_string(max_scans));
  kv.Set("data", "synth_spec", synth_spec);
  kv.Set("data", "train_scans", std::to_string(train_scans));
  kv.Set("data", "eval_scans", std::to_string(eval_scans));
  kv.Set("grid", "kind", GridKindName(grid_kind));
  cartesian.ToConfig(kv, "grid.cartesian");
  polar.ToConfig(kv, "grid.polar");
  spherical.ToConfig(kv, "grid.spherical");
  kv.Set("encoder", "widths", JoinInts(encoder_widths));
  kv.Set("encoder", "normalize", normalize_features ? "true" : "false");
  kv.Set("network", "channels", JoinInts(channels));
  kv.Set("network", "kernel", std::to_string(kernel));
  auto flag = [](bool b) { return b ? "true" : "false"; };
  kv.Set("ablation", "ring_conv", flag(ring_conv));
  kv.Set("ablation", "nine_features", flag(nine_features));
  kv.Set("ablation", "flip_augment", flag(flip_augment));
  kv.Set("ablation", "fixed_volume", flag(fixed_volume));
  kv.Set("ablation", "tuned_grid", flag(tuned_grid));
  kv.Set("ablation", "untuned_cells", JoinInts(untuned_cells));
  kv.Set("train", "steps", std::to_string(steps));
  kv.Set("train", "learning_rate", FormatDouble(learning_rate));
  kv.Set("train", "momentum", FormatDouble(momentum));
  kv.Set("train", "weight_decay", FormatDouble(weight_decay));
  kv.Set("train", "batch", std::to_string(batch));
  kv.Set("train", "class_weighting", flag(class_weighting));
  kv.Set("train", "log_every", std::to_string(log_every));
  kv.Set("eval", "distance_edges", JoinDoubles(distance_edges));
  kv.Set("eval", "stats_bins", std::to_string(stats_bins));
  kv.Set("eval", "stats_min", FormatDouble(stats_min));
  kv.Set("eval", "stats_max", FormatDouble(stats_max));
  kv.Set("eval", "checkpoint", checkpoint);
  kv.Set("eval", "predictions", predictions);
  kv.Set("run", "seed", std::to_string(seed));
  kv.Set("run", "out", out);
  kv.Set("run", "threads", std::to_string(threads));
  return kv;
}

void ExperimentConfig::Validate() const {
  Require(source == "synth" || source == "kitti", ErrorCode::kConfig,
          "data.source must be 'synth' or 'kitti'");
  if (source == "kitti") {
    Require(!root.empty(), ErrorCode::kConfig, "data.root is required for kitti data");
  }
  Require(train_scans >= 0 && eval_scans >= 0 && max_scans >= 0, ErrorCode::kConfig,
          "data: scan counts must be non-negative");
  Require(cartesian.kind == GridKind::kCartesian && polar.kind == GridKind::kPolar &&
              spherical.kind == GridKind::kSpherical,
          ErrorCode::kConfig, "grid.<kind> sections must declare their own kind");
  cartesian.Validate();
  polar.Validate();
  spherical.Validate();
  Require(!encoder_widths.empty(), ErrorCode::kConfig, "encoder.widths is empty");
  for (int w : encoder_widths) {
    Require(w > 0, ErrorCode::kConfig, "encoder.widths must be positive");
  }
  Require(!channels.empty(), ErrorCode::kConfig, "network.channels is empty");
  for (int ch : channels) {
    Require(ch > 0, ErrorCode::kConfig, "network.channels must be positive");
  }
  Require(kernel >= 1 && kernel % 2 == 1, ErrorCode::kConfig,
          "network.kernel must be a positive odd number");
  Require(untuned_cells.size() == 3, ErrorCode::kConfig,
          "ablation.untuned_cells needs 3 counts");
  Require(steps >= 0, ErrorCode::kConfig, "train.steps must be non-negative");
  Require(batch >= 1, ErrorCode::kConfig, "train.batch must be at least 1");
  Require(std::isfinite(learning_rate) && learning_rate >= 0.0, ErrorCode::kConfig,
          "train.learning_rate must be a non-negative number");
  Require(std::isfinite(momentum) && momentum >= 0.0 && momentum < 1.0,
          ErrorCode::kConfig, "train.momentum must be in [0, 1)");
  Require(distance_edges.size() >= 2, ErrorCode::kConfig,
          "eval.distance_edges needs at least two edges");
  for (std::size_t e = 1; e < distance_edges.size(); ++e) {
    Require(distance_edges[e] > distance_edges[e - 1], ErrorCode::kConfig,
            "eval.distance_edges must increase");
  }
  Require(stats_bins >= 1 && stats_min > 0.0 && stats_max > stats_min,
          ErrorCode::kConfig, "eval: stats bins need 0 < stats_min < stats_max");
  Require(!out.empty(), ErrorCode::kConfig, "run.out is empty");
  Require(threads >= 1, ErrorCode::kConfig, "run.threads must be at least 1");
}

const GridSpec& ExperimentConfig::grid(GridKind kind) const {
  switch (kind) {
    case GridKind::kCartesian:
      return cartesian;
    case GridKind::kPolar:
      return polar;
    case GridKind::kSpherical:
      return spherical;
  }
  return polar;
}

GridSpec ExperimentConfig::EffectiveGrid(GridKind kind) const {
  GridSpec spec = grid(kind);
  if (!tuned_grid) {
    spec.cells[0] = untuned_cells[0];
    spec.cells[1] = untuned_cells[1];
    if (kind != GridKind::kSpherical) spec.cells[2] = untuned_cells[2];
  }
  spec.Validate();
  return spec;
}

SegmenterConfig ExperimentConfig::ModelConfig(GridKind kind, int num_classes,
                                              std::optional<ClassId> ignore) const {
  SegmenterConfig m;
  m.grid = EffectiveGrid(kind);
  m.features.nine_features = nine_features;
  m.features.normalize = normalize_features;
  m.encoder_widths = encoder_widths;
  m.channels = channels;
  m.kernel = kernel;
  m.num_classes = num_classes;
  m.ignore = ignore;
  m.ring_conv = ring_conv;
  m.fixed_volume = fixed_volume;
  return m;
}

Dataset OpenDataset(const ExperimentConfig& config) {
  Dataset data;
  if (config.source == "synth") {
    const SynthSpec spec = LoadSynthSpec(config);
    data.label_map = spec.label_map();
    data.train = SynthSplit(spec, config.seed, kTrainScanSalt, config.train_scans, "00");
    data.eval = SynthSplit(spec, config.seed, kEvalScanSalt, config.eval_scans, "01");
    return data;
  }
  std::string map_path = config.label_map;
  if (map_path.empty()) map_path = (fs::path(config.root) / "label_map.ini").string();
  data.label_map = LabelMap::FromFile(map_path);
  data.train = KittiSplit(config, config.train_sequences, data.label_map);
  data.eval = KittiSplit(config, config.eval_sequences, data.label_map);
  return data;
}

std::string RunCommand(const std::string& command, const ExperimentConfig& config) {
  return Runner(config).Run(command);
}

const std::vector<std::string>& CommandNames() {
  static const std::vector<std::string> names = {
      "synth", "stats", "purity", "upper-bound", "train", "eval", "predict", "compare"};
  return names;
}

}  // namespace polargrid
