#include "lrcset/lrcset.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/classifier.hpp"
#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/gallery_io.hpp"
#include "core/image_io.hpp"
#include "core/protocol.hpp"

namespace fs = std::filesystem;

struct lrcset_gallery {
  lrcset::Gallery g;
};

struct lrcset_result {
  lrcset::ClassificationResult r;
  std::vector<std::string> labels;
  std::string set_id;
};

struct lrcset_stream {
  const lrcset_gallery* gallery;
  lrcset::StreamState state;
  lrcset::VoteConfig vote;
};

namespace {

thread_local std::string t_last_error;

lrcset_status fail(lrcset_status status, const char* what) {
  t_last_error = what;
  return status;
}

template <typename Fn>
lrcset_status wrap(Fn&& fn) {
  try {
    t_last_error.clear();
    return fn();
  } catch (const lrcset::InvalidInput& e) {
    return fail(LRCSET_ERR_INVALID_INPUT, e.what());
  } catch (const lrcset::InvalidConfig& e) {
    return fail(LRCSET_ERR_INVALID_CONFIG, e.what());
  } catch (const lrcset::ConditionViolation& e) {
    return fail(LRCSET_ERR_CONDITION_VIOLATION, e.what());
  } catch (const lrcset::SingularRegressor& e) {
    return fail(LRCSET_ERR_SINGULAR, e.what());
  } catch (const lrcset::UnsupportedOperation& e) {
    return fail(LRCSET_ERR_UNSUPPORTED, e.what());
  } catch (const lrcset::IngestError& e) {
    return fail(LRCSET_ERR_INGEST, e.what());
  } catch (const lrcset::ProtocolError& e) {
    return fail(LRCSET_ERR_PROTOCOL, e.what());
  } catch (const lrcset::IoError& e) {
    return fail(LRCSET_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(LRCSET_ERR_INTERNAL, e.what());
  }
}

lrcset_status require(bool ok, const char* what) {
  return ok ? LRCSET_OK : fail(LRCSET_ERR_INVALID_ARGUMENT, what);
}

lrcset::VoteConfig vote_config_from(const lrcset_vote_options* vote) {
  lrcset::VoteConfig cfg;
  switch (vote->strategy) {
    case LRCSET_VOTE_EXPONENTIAL:
      cfg.strategy = lrcset::VoteStrategy::exponential;
      break;
    case LRCSET_VOTE_MAJORITY:
      cfg.strategy = lrcset::VoteStrategy::majority;
      break;
    case LRCSET_VOTE_KNN:
      cfg.strategy = lrcset::VoteStrategy::knn;
      break;
    default:
      throw lrcset::InvalidConfig("unknown voting strategy code " +
                                  std::to_string(vote->strategy));
  }
  cfg.alpha = vote->alpha;
  cfg.k = vote->k;
  return cfg;
}

// Sorted image files of one directory, loaded as a raster list.
std::vector<lrcset::Raster> load_set_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw lrcset::InvalidInput("not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw lrcset::InvalidInput("no files in set directory: " + dir);
  std::vector<lrcset::Raster> rasters;
  rasters.reserve(files.size());
  for (const auto& f : files) rasters.push_back(lrcset::load_image(f));
  return rasters;
}

lrcset_result* make_result(lrcset::ClassificationResult r, const lrcset_gallery* gallery,
                           std::string set_id) {
  auto* out = new lrcset_result;
  out->r = std::move(r);
  out->labels = gallery->g.labels;
  out->set_id = std::move(set_id);
  return out;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* lrcset_version(void) { return "0.1.0"; }

const char* lrcset_status_name(lrcset_status status) {
  switch (status) {
    case LRCSET_OK: return "ok";
    case LRCSET_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case LRCSET_ERR_INVALID_INPUT: return "invalid-input";
    case LRCSET_ERR_INVALID_CONFIG: return "invalid-config";
    case LRCSET_ERR_CONDITION_VIOLATION: return "condition-violation";
    case LRCSET_ERR_SINGULAR: return "singular-regressor";
    case LRCSET_ERR_UNSUPPORTED: return "unsupported";
    case LRCSET_ERR_INGEST: return "ingest-error";
    case LRCSET_ERR_PROTOCOL: return "protocol-error";
    case LRCSET_ERR_IO: return "io-error";
    case LRCSET_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* lrcset_last_error(void) { return t_last_error.c_str(); }

lrcset_status lrcset_gallery_build(const char* data_root, const lrcset_gallery_options* options,
                                   lrcset_gallery** out) {
  if (auto s = require(data_root && options && out, "gallery_build: null argument")) return s;
  return wrap([&] {
    const lrcset::DatasetManifest manifest = lrcset::ingest_dataset(data_root);
    std::vector<lrcset::LabeledRasterSet> classes;
    for (const auto& cls : manifest.classes) {
      std::vector<lrcset::Raster> rasters;
      for (const auto& set : cls.sets)
        for (const auto& file : set.files) rasters.push_back(lrcset::load_image(file));
      classes.emplace_back(cls.label, std::move(rasters));
    }
    lrcset::GalleryConfig cfg;
    cfg.preprocess.rows = options->rows;
    cfg.preprocess.cols = options->cols;
    cfg.preprocess.equalize = options->equalize != 0;
    cfg.preprocess.standardize = options->standardize != 0;
    cfg.gallery_size = options->gallery_images;
    cfg.remedy =
        options->remedy == LRCSET_REMEDY_QR ? lrcset::Remedy::qr : lrcset::Remedy::perturb;
    cfg.seed = options->seed;
    *out = new lrcset_gallery{lrcset::form_gallery(classes, cfg)};
    return LRCSET_OK;
  });
}

lrcset_status lrcset_gallery_save(const lrcset_gallery* gallery, const char* path) {
  if (auto s = require(gallery && path, "gallery_save: null argument")) return s;
  return wrap([&] {
    lrcset::save_gallery(gallery->g, path);
    return LRCSET_OK;
  });
}

lrcset_status lrcset_gallery_load(const char* path, lrcset_gallery** out) {
  if (auto s = require(path && out, "gallery_load: null argument")) return s;
  return wrap([&] {
    *out = new lrcset_gallery{lrcset::load_gallery(path)};
    return LRCSET_OK;
  });
}

void lrcset_gallery_free(lrcset_gallery* gallery) { delete gallery; }

int lrcset_gallery_class_count(const lrcset_gallery* gallery) {
  return gallery ? gallery->g.class_count() : 0;
}

const char* lrcset_gallery_label(const lrcset_gallery* gallery, int class_index) {
  if (!gallery || class_index < 0 || class_index >= gallery->g.class_count()) return nullptr;
  return gallery->g.labels[static_cast<std::size_t>(class_index)].c_str();
}

lrcset_status lrcset_gallery_dims(const lrcset_gallery* gallery, int* rows, int* cols) {
  if (auto s = require(gallery && rows && cols, "gallery_dims: null argument")) return s;
  *rows = gallery->g.preprocess.rows;
  *cols = gallery->g.preprocess.cols;
  return LRCSET_OK;
}

lrcset_status lrcset_classify_dir(const lrcset_gallery* gallery, const char* set_dir,
                                  const lrcset_vote_options* vote, lrcset_result** out) {
  if (auto s = require(gallery && set_dir && vote && out, "classify_dir: null argument")) return s;
  return wrap([&] {
    const auto rasters = load_set_dir(set_dir);
    const lrcset::TestSet ts =
        lrcset::make_test_set(gallery->g, rasters, fs::path(set_dir).filename().string());
    lrcset::ClassificationResult res =
        lrcset::classify_set(gallery->g, ts, vote_config_from(vote));
    *out = make_result(std::move(res), gallery, ts.set_id);
    return LRCSET_OK;
  });
}

int lrcset_result_predicted(const lrcset_result* result) { return result ? result->r.predicted : -1; }

const char* lrcset_result_predicted_label(const lrcset_result* result) {
  if (!result || result->r.predicted < 0 ||
      result->r.predicted >= static_cast<int>(result->labels.size()))
    return nullptr;
  return result->labels[static_cast<std::size_t>(result->r.predicted)].c_str();
}

int lrcset_result_tie(const lrcset_result* result) { return result && result->r.tie ? 1 : 0; }

int lrcset_result_class_count(const lrcset_result* result) {
  return result ? static_cast<int>(result->r.Theta.size()) : 0;
}

int lrcset_result_image_count(const lrcset_result* result) {
  return result ? static_cast<int>(result->r.distances.cols()) : 0;
}

double lrcset_result_theta(const lrcset_result* result, int class_index) {
  if (!result || class_index < 0 || class_index >= result->r.Theta.size()) return std::nan("");
  return result->r.Theta(class_index);
}

double lrcset_result_distance(const lrcset_result* result, int class_index, int image_index) {
  if (!result || class_index < 0 || class_index >= result->r.distances.rows() ||
      image_index < 0 || image_index >= result->r.distances.cols())
    return std::nan("");
  return result->r.distances(class_index, image_index);
}

lrcset_status lrcset_result_json(const lrcset_result* result, int include_distances,
                                 char** json_out) {
  if (auto s = require(result && json_out, "result_json: null argument")) return s;
  return wrap([&] {
    nlohmann::json j;
    j["set_id"] = result->set_id;
    j["predicted_index"] = result->r.predicted;
    j["predicted_label"] =
        result->r.predicted >= 0 && result->r.predicted < static_cast<int>(result->labels.size())
            ? result->labels[static_cast<std::size_t>(result->r.predicted)]
            : "";
    j["tie"] = result->r.tie;
    nlohmann::json theta = nlohmann::json::array();
    for (Eigen::Index c = 0; c < result->r.Theta.size(); ++c)
      theta.push_back({{"label", result->labels[static_cast<std::size_t>(c)]},
                       {"score", result->r.Theta(c)}});
    j["Theta"] = std::move(theta);
    if (include_distances) {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index c = 0; c < result->r.distances.rows(); ++c) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index m = 0; m < result->r.distances.cols(); ++m)
          row.push_back(result->r.distances(c, m));
        rows.push_back(std::move(row));
      }
      j["distances"] = std::move(rows);
    }
    *json_out = dup_string(j.dump(2) + "\n");
    return LRCSET_OK;
  });
}

void lrcset_result_free(lrcset_result* result) { delete result; }

lrcset_status lrcset_stream_new(const lrcset_gallery* gallery, const lrcset_vote_options* vote,
                                lrcset_stream** out) {
  if (auto s = require(gallery && vote && out, "stream_new: null argument")) return s;
  return wrap([&] {
    const lrcset::VoteConfig cfg = vote_config_from(vote);
    if (cfg.strategy == lrcset::VoteStrategy::knn)
      throw lrcset::UnsupportedOperation(
          "stream_new: knn voting needs the full distance pool and cannot run online");
    *out = new lrcset_stream{gallery, {}, cfg};
    return LRCSET_OK;
  });
}

lrcset_status lrcset_stream_push(lrcset_stream* stream, const char* image_path,
                                 lrcset_result** current) {
  if (auto s = require(stream && image_path && current, "stream_push: null argument")) return s;
  return wrap([&] {
    const lrcset::Raster raster = lrcset::load_image(image_path);
    const lrcset::ImageVector v =
        lrcset::preprocess_pipeline(raster, stream->gallery->g.preprocess);
    lrcset::ClassificationResult res =
        lrcset::classify_stream(stream->gallery->g, stream->state, v, stream->vote);
    *current = make_result(std::move(res), stream->gallery, fs::path(image_path).stem().string());
    return LRCSET_OK;
  });
}

void lrcset_stream_free(lrcset_stream* stream) { delete stream; }

lrcset_status lrcset_synth_generate(const lrcset_synth_options* options, const char* out_dir) {
  if (auto s = require(options && out_dir, "synth_generate: null argument")) return s;
  return wrap([&] {
    lrcset::SynthParams p;
    p.classes = options->classes;
    p.sets_per_class = options->sets_per_class;
    p.images_per_set = options->images_per_set;
    p.rows = options->rows;
    p.cols = options->cols;
    p.rank = options->rank;
    p.sigma = options->sigma;
    p.seed = options->seed;
    lrcset::generate_synthetic(p, out_dir);
    return LRCSET_OK;
  });
}

lrcset_status lrcset_benchmark_run(const char* data_root, const char* config_json,
                                   char** report_json) {
  if (auto s = require(data_root && config_json && report_json, "benchmark_run: null argument"))
    return s;
  return wrap([&] {
    const lrcset::ProtocolConfig cfg = lrcset::protocol_config_from_json(config_json);
    const lrcset::DatasetManifest manifest = lrcset::ingest_dataset(data_root);
    const lrcset::ProtocolReport report = lrcset::run_protocol(manifest, cfg);
    *report_json = dup_string(lrcset::report_to_json(report));
    return LRCSET_OK;
  });
}

lrcset_status lrcset_report_to_csv(const char* report_json, char** csv_out) {
  if (auto s = require(report_json && csv_out, "report_to_csv: null argument")) return s;
  return wrap([&] {
    *csv_out = dup_string(lrcset::report_json_to_csv(report_json));
    return LRCSET_OK;
  });
}

void lrcset_string_free(char* s) { delete[] s; }

}  // extern "C"
