#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/classifier.hpp"
#include "core/dataset.hpp"

namespace lrcset {

struct ProtocolConfig {
  int repeats = 10;
  int gallery_sets_per_class = 1;
  int gallery_images_per_set = 0;  // 0 = every image of each chosen gallery set
  PreprocessConfig preprocess;
  VoteConfig vote;
  Remedy remedy = Remedy::perturb;
  SolverPath path = SolverPath::fast;
  std::uint64_t master_seed = 0;
  std::string preset = "custom";  // echoed into reports
};

struct SetOutcome {
  std::string set_id;  // "<class>/<set>"
  std::string true_label;
  std::string predicted_label;
  bool tie = false;
  bool correct = false;
  double seconds = 0.0;  // wall clock around classify_set only
};

struct RepeatOutcome {
  int repeat = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double gallery_seconds = 0.0;
  std::vector<SetOutcome> sets;
};

struct ProtocolReport {
  ProtocolConfig config;
  std::vector<RepeatOutcome> repeats;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population deviation across repeats
  double mean_gallery_seconds = 0.0;
  double mean_set_seconds = 0.0;
  double total_seconds = 0.0;
};

/// Runs the split-and-repeat evaluation: per repeat, a seeded random choice
/// of gallery sets and gallery images per class, gallery formation, then
/// classification of every remaining set.
ProtocolReport run_protocol(const DatasetManifest& manifest, const ProtocolConfig& cfg);

/// run_protocol with the solver path forced; the report carries the
/// gallery-formation and per-set timings of that mode.
ProtocolReport benchmark_timing(const DatasetManifest& manifest, ProtocolConfig cfg,
                                SolverPath mode);

/// Named parameter bundles: mobo, ytc, honda, eth80 or custom.
ProtocolConfig preset_config(const std::string& name);

/// Parses {"preset": ..., "repeats": ..., ...}; explicit keys override the
/// preset's values. Unknown keys are rejected.
ProtocolConfig protocol_config_from_json(const std::string& json_text);

std::string report_to_json(const ProtocolReport& report);
std::string report_to_csv(const ProtocolReport& report);

/// Converts a serialized JSON report to the CSV projection.
std::string report_json_to_csv(const std::string& report_json);

/// format is "json" or "csv".
void emit_report(const ProtocolReport& report, const std::string& format,
                 const std::string& path);

}  // namespace lrcset
