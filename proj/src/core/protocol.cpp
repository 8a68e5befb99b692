#include "core/protocol.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/image_io.hpp"
#include "core/rng.hpp"

namespace lrcset {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string strategy_name(VoteStrategy s) {
  switch (s) {
    case VoteStrategy::exponential: return "exponential";
    case VoteStrategy::majority: return "majority";
    case VoteStrategy::knn: return "knn";
  }
  return "?";
}

VoteStrategy strategy_from(const std::string& name) {
  if (name == "exponential") return VoteStrategy::exponential;
  if (name == "majority") return VoteStrategy::majority;
  if (name == "knn") return VoteStrategy::knn;
  throw InvalidConfig("unknown voting strategy: " + name);
}

std::string remedy_name(Remedy r) { return r == Remedy::perturb ? "perturb" : "qr"; }

Remedy remedy_from(const std::string& name) {
  if (name == "perturb") return Remedy::perturb;
  if (name == "qr") return Remedy::qr;
  throw InvalidConfig("unknown remedy: " + name);
}

std::string mode_name(SolverPath p) { return p == SolverPath::fast ? "fast" : "naive"; }

SolverPath mode_from(const std::string& name) {
  if (name == "fast") return SolverPath::fast;
  if (name == "naive") return SolverPath::naive;
  throw InvalidConfig("unknown solver mode: " + name);
}

std::vector<Raster> load_rasters(const std::vector<std::string>& files) {
  std::vector<Raster> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_image(f));
  return out;
}

nlohmann::json config_to_json(const ProtocolConfig& cfg) {
  nlohmann::json j;
  j["preset"] = cfg.preset;
  j["mode"] = mode_name(cfg.path);
  j["repeats"] = cfg.repeats;
  j["seed"] = cfg.master_seed;
  j["dims"] = {cfg.preprocess.rows, cfg.preprocess.cols};
  j["equalize"] = cfg.preprocess.equalize;
  j["standardize"] = cfg.preprocess.standardize;
  j["strategy"] = strategy_name(cfg.vote.strategy);
  j["alpha"] = cfg.vote.alpha;
  j["k"] = cfg.vote.k;
  j["gallery_sets_per_class"] = cfg.gallery_sets_per_class;
  j["gallery_images_per_set"] = cfg.gallery_images_per_set;
  j["remedy"] = remedy_name(cfg.remedy);
  return j;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

ProtocolReport run_protocol(const DatasetManifest& manifest, const ProtocolConfig& cfg) {
  if (cfg.repeats < 1) throw InvalidConfig("run_protocol: repeats must be at least 1");
  if (cfg.gallery_sets_per_class < 1)
    throw InvalidConfig("run_protocol: gallery_sets_per_class must be at least 1");
  if (manifest.classes.empty()) throw ProtocolError("run_protocol: manifest has no classes");
  for (const auto& cls : manifest.classes) {
    // Every class must keep at least one set aside for testing.
    if (static_cast<int>(cls.sets.size()) < cfg.gallery_sets_per_class + 1)
      throw ProtocolError("run_protocol: class '" + cls.label + "' has " +
                          std::to_string(cls.sets.size()) + " sets but the split needs " +
                          std::to_string(cfg.gallery_sets_per_class) +
                          " gallery sets plus at least one test set");
  }

  ProtocolReport report;
  report.config = cfg;
  const auto total_start = Clock::now();

  for (int r = 0; r < cfg.repeats; ++r) {
    RepeatOutcome repeat;
    repeat.repeat = r;
    repeat.seed = rng::derive_seed(cfg.master_seed, static_cast<std::uint64_t>(r));
    std::mt19937_64 gen(repeat.seed);

    std::vector<LabeledRasterSet> gallery_classes;
    struct PendingTest {
      std::string set_id;
      std::string true_label;
      const SetEntry* entry;
    };
    std::vector<PendingTest> test_sets;

    for (const auto& cls : manifest.classes) {
      const auto picked = rng::sample_without_replacement(
          cls.sets.size(), static_cast<std::size_t>(cfg.gallery_sets_per_class), gen);
      std::set<std::size_t> gallery_idx(picked.begin(), picked.end());

      std::vector<Raster> gallery_rasters;
      for (std::size_t si : picked) {
        const auto& files = cls.sets[si].files;
        const std::size_t want = cfg.gallery_images_per_set == 0
                                     ? files.size()
                                     : std::min<std::size_t>(
                                           files.size(),
                                           static_cast<std::size_t>(cfg.gallery_images_per_set));
        for (std::size_t fi : rng::sample_without_replacement(files.size(), want, gen))
          gallery_rasters.push_back(load_image(files[fi]));
      }
      gallery_classes.emplace_back(cls.label, std::move(gallery_rasters));

      for (std::size_t si = 0; si < cls.sets.size(); ++si)
        if (!gallery_idx.count(si))
          test_sets.push_back({cls.label + "/" + cls.sets[si].set_id, cls.label, &cls.sets[si]});
    }

    GalleryConfig gcfg;
    gcfg.preprocess = cfg.preprocess;
    gcfg.gallery_size = 0;  // image sampling already happened per set above
    gcfg.remedy = cfg.remedy;
    gcfg.seed = repeat.seed;
    const auto gallery_start = Clock::now();
    const Gallery gallery = form_gallery(gallery_classes, gcfg);
    repeat.gallery_seconds = seconds_since(gallery_start);

    int correct = 0;
    for (const auto& pending : test_sets) {
      const TestSet ts =
          make_test_set(gallery, load_rasters(pending.entry->files), pending.set_id);
      const auto classify_start = Clock::now();
      const ClassificationResult res = classify_set(gallery, ts, cfg.vote, cfg.path);
      const double elapsed = seconds_since(classify_start);

      SetOutcome outcome;
      outcome.set_id = pending.set_id;
      outcome.true_label = pending.true_label;
      outcome.predicted_label = gallery.labels[static_cast<std::size_t>(res.predicted)];
      outcome.tie = res.tie;
      outcome.correct = outcome.predicted_label == outcome.true_label;
      outcome.seconds = elapsed;
      if (outcome.correct) ++correct;
      repeat.sets.push_back(std::move(outcome));
    }

    repeat.accuracy =
        repeat.sets.empty() ? 0.0 : static_cast<double>(correct) / repeat.sets.size();
    report.repeats.push_back(std::move(repeat));
  }

  double acc_sum = 0.0, gal_sum = 0.0, set_sum = 0.0;
  std::size_t set_count = 0;
  for (const auto& rep : report.repeats) {
    acc_sum += rep.accuracy;
    gal_sum += rep.gallery_seconds;
    for (const auto& s : rep.sets) {
      set_sum += s.seconds;
      ++set_count;
    }
  }
  const double n = static_cast<double>(report.repeats.size());
  report.mean_accuracy = acc_sum / n;
  double var = 0.0;
  for (const auto& rep : report.repeats) {
    const double d = rep.accuracy - report.mean_accuracy;
    var += d * d;
  }
  report.std_accuracy = std::sqrt(var / n);
  report.mean_gallery_seconds = gal_sum / n;
  report.mean_set_seconds = set_count ? set_sum / static_cast<double>(set_count) : 0.0;
  report.total_seconds = seconds_since(total_start);
  return report;
}

ProtocolReport benchmark_timing(const DatasetManifest& manifest, ProtocolConfig cfg,
                                SolverPath mode) {
  cfg.path = mode;
  return run_protocol(manifest, cfg);
}

ProtocolConfig preset_config(const std::string& name) {
  ProtocolConfig cfg;
  cfg.preset = name;
  if (name == "mobo") {
    cfg.preprocess = {40, 40, true, false};
    cfg.vote.alpha = 0.2;
    cfg.gallery_sets_per_class = 1;
    cfg.gallery_images_per_set = 50;
  } else if (name == "ytc") {
    cfg.preprocess = {30, 30, true, false};
    cfg.vote.alpha = 10.5;
    cfg.gallery_sets_per_class = 3;
    cfg.gallery_images_per_set = 20;
  } else if (name == "honda") {
    cfg.preprocess = {20, 20, true, true};
    cfg.vote.alpha = 0.2;
    cfg.gallery_sets_per_class = 1;
    cfg.gallery_images_per_set = 50;
  } else if (name == "eth80") {
    cfg.preprocess = {32, 32, false, true};
    cfg.vote.alpha = 0.2;
    cfg.gallery_sets_per_class = 5;
    cfg.gallery_images_per_set = 0;
  } else if (name != "custom") {
    throw InvalidConfig("unknown preset: " + name);
  }
  return cfg;
}

ProtocolConfig protocol_config_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("invalid config JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidConfig("config JSON must be an object");

  static const std::set<std::string> known = {
      "preset",      "mode",  "repeats", "seed", "dims", "equalize", "standardize",
      "strategy",    "alpha", "k",       "gallery_sets_per_class",
      "gallery_images_per_set", "remedy"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw InvalidConfig("unknown config key: " + key);

  ProtocolConfig cfg = preset_config(j.value("preset", std::string("custom")));
  try {
    if (j.contains("mode")) cfg.path = mode_from(j["mode"].get<std::string>());
    if (j.contains("repeats")) cfg.repeats = j["repeats"].get<int>();
    if (j.contains("seed")) cfg.master_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("dims")) {
      const auto dims = j["dims"];
      if (!dims.is_array() || dims.size() != 2)
        throw InvalidConfig("dims must be a [rows, cols] pair");
      cfg.preprocess.rows = dims[0].get<int>();
      cfg.preprocess.cols = dims[1].get<int>();
    }
    if (j.contains("equalize")) cfg.preprocess.equalize = j["equalize"].get<bool>();
    if (j.contains("standardize")) cfg.preprocess.standardize = j["standardize"].get<bool>();
    if (j.contains("strategy")) cfg.vote.strategy = strategy_from(j["strategy"].get<std::string>());
    if (j.contains("alpha")) cfg.vote.alpha = j["alpha"].get<double>();
    if (j.contains("k")) cfg.vote.k = j["k"].get<int>();
    if (j.contains("gallery_sets_per_class"))
      cfg.gallery_sets_per_class = j["gallery_sets_per_class"].get<int>();
    if (j.contains("gallery_images_per_set"))
      cfg.gallery_images_per_set = j["gallery_images_per_set"].get<int>();
    if (j.contains("remedy")) cfg.remedy = remedy_from(j["remedy"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("invalid config value: ") + e.what());
  }
  if (cfg.preprocess.rows < 1 || cfg.preprocess.cols < 1)
    throw InvalidConfig("config needs positive dims (preset 'custom' requires them explicitly)");
  return cfg;
}

std::string report_to_json(const ProtocolReport& report) {
  nlohmann::json j;
  j["format"] = "lrcset-report-v1";
  j["config"] = config_to_json(report.config);
  j["repeats"] = nlohmann::json::array();
  for (const auto& rep : report.repeats) {
    nlohmann::json jr;
    jr["repeat"] = rep.repeat;
    jr["seed"] = rep.seed;
    jr["accuracy"] = rep.accuracy;
    jr["gallery_seconds"] = rep.gallery_seconds;
    jr["sets"] = nlohmann::json::array();
    for (const auto& s : rep.sets) {
      nlohmann::json js;
      js["set_id"] = s.set_id;
      js["true_label"] = s.true_label;
      js["predicted_label"] = s.predicted_label;
      js["tie"] = s.tie;
      js["correct"] = s.correct;
      js["seconds"] = s.seconds;
      jr["sets"].push_back(std::move(js));
    }
    j["repeats"].push_back(std::move(jr));
  }
  j["summary"] = {{"mean_accuracy", report.mean_accuracy},
                  {"std_accuracy", report.std_accuracy},
                  {"mean_gallery_seconds", report.mean_gallery_seconds},
                  {"mean_set_seconds", report.mean_set_seconds},
                  {"total_seconds", report.total_seconds}};
  return j.dump(2) + "\n";
}

std::string report_json_to_csv(const std::string& report_json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(report_json);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("invalid report JSON: ") + e.what());
  }
  std::string csv = "repeat,set_id,true_label,predicted_label,decided_by_tie,seconds\n";
  for (const auto& rep : j.at("repeats")) {
    for (const auto& s : rep.at("sets")) {
      csv += std::to_string(rep.at("repeat").get<int>());
      csv += ',' + csv_escape(s.at("set_id").get<std::string>());
      csv += ',' + csv_escape(s.at("true_label").get<std::string>());
      csv += ',' + csv_escape(s.at("predicted_label").get<std::string>());
      csv += s.at("tie").get<bool>() ? ",true" : ",false";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.9f", s.at("seconds").get<double>());
      csv += ',';
      csv += buf;
      csv += '\n';
    }
  }
  return csv;
}

std::string report_to_csv(const ProtocolReport& report) {
  return report_json_to_csv(report_to_json(report));
}

void emit_report(const ProtocolReport& report, const std::string& format,
                 const std::string& path) {
  if (path.empty()) throw IoError("emit_report: empty output path");
  std::string text;
  if (format == "json") {
    text = report_to_json(report);
  } else if (format == "csv") {
    text = report_to_csv(report);
  } else {
    throw InvalidConfig("emit_report: unknown format '" + format + "' (use json or csv)");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report file: " + path);
  out << text;
  if (!out) throw IoError("failed writing report file: " + path);
}

}  // namespace lrcset
