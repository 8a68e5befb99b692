#include "core/dataset.hpp"

#include <Eigen/Core>
#include <Eigen/QR>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/image_io.hpp"
#include "core/rng.hpp"

namespace fs = std::filesystem;

namespace lrcset {

namespace {

std::vector<fs::directory_entry> sorted_entries(const fs::path& dir) {
  std::vector<fs::directory_entry> entries{fs::directory_iterator(dir),
                                           fs::directory_iterator()};
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.path().filename() < b.path().filename(); });
  return entries;
}

std::string pad4(int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", v);
  return buf;
}

}  // namespace

DatasetManifest ingest_dataset(const std::string& root) {
  if (!fs::is_directory(root)) throw IngestError("dataset root is not a directory: " + root);

  DatasetManifest manifest;
  manifest.root = root;
  std::vector<std::string> problems;

  for (const auto& class_entry : sorted_entries(root)) {
    if (!class_entry.is_directory()) continue;  // root-level metadata files are fine
    ClassEntry cls;
    cls.label = class_entry.path().filename().string();
    for (const auto& set_entry : sorted_entries(class_entry.path())) {
      if (!set_entry.is_directory()) {
        problems.push_back("unexpected file at class level: " + set_entry.path().string());
        continue;
      }
      SetEntry set;
      set.set_id = set_entry.path().filename().string();
      for (const auto& file_entry : sorted_entries(set_entry.path())) {
        if (file_entry.is_directory()) {
          problems.push_back("unexpected directory inside set: " + file_entry.path().string());
          continue;
        }
        const std::string file = file_entry.path().string();
        if (!sniff_image(file)) {
          problems.push_back("not a readable image: " + file);
          continue;
        }
        set.files.push_back(file);
      }
      if (set.files.empty())
        problems.push_back("set has no images: " + set_entry.path().string());
      manifest.image_count += set.files.size();
      cls.sets.push_back(std::move(set));
    }
    if (cls.sets.empty()) problems.push_back("class has no sets: " + class_entry.path().string());
    manifest.classes.push_back(std::move(cls));
  }

  if (manifest.classes.empty()) problems.push_back("no class directories under: " + root);
  if (!problems.empty()) {
    std::string message = "dataset ingest failed:";
    for (const auto& p : problems) message += "\n  " + p;
    throw IngestError(message);
  }
  return manifest;
}

void generate_synthetic(const SynthParams& p, const std::string& out_dir) {
  const Eigen::Index t = static_cast<Eigen::Index>(p.rows) * p.cols;
  if (p.classes < 1 || p.sets_per_class < 1 || p.images_per_set < 1)
    throw InvalidInput("generate_synthetic: class/set/image counts must be positive");
  if (p.rows < 1 || p.cols < 1) throw InvalidInput("generate_synthetic: dims must be positive");
  if (p.rank < 1 || p.rank > t)
    throw InvalidInput("generate_synthetic: rank must lie in [1, " + std::to_string(t) +
                       "], got " + std::to_string(p.rank));
  if (p.sigma < 0.0) throw InvalidInput("generate_synthetic: sigma must be non-negative");

  fs::create_directories(out_dir);

  for (int c = 0; c < p.classes; ++c) {
    std::mt19937_64 gen(rng::derive_seed(p.seed, static_cast<std::uint64_t>(c)));

    Eigen::MatrixXd raw(t, p.rank);
    for (Eigen::Index j = 0; j < p.rank; ++j)
      for (Eigen::Index i = 0; i < t; ++i) raw(i, j) = rng::gaussian(gen);
    const Eigen::MatrixXd basis =
        Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() *
        Eigen::MatrixXd::Identity(t, p.rank);

    const fs::path class_dir = fs::path(out_dir) / ("class" + pad4(c));
    for (int s = 0; s < p.sets_per_class; ++s) {
      const fs::path set_dir = class_dir / ("set" + pad4(s));
      fs::create_directories(set_dir);
      for (int i = 0; i < p.images_per_set; ++i) {
        Eigen::VectorXd coeff(p.rank);
        for (Eigen::Index j = 0; j < p.rank; ++j) coeff(j) = rng::gaussian(gen);
        Eigen::VectorXd v = basis * coeff;
        if (p.sigma > 0.0)
          for (Eigen::Index j = 0; j < t; ++j) v(j) += p.sigma * rng::gaussian(gen);

        const double lo = v.minCoeff();
        const double hi = v.maxCoeff();
        if (hi - lo < 1e-12) {
          v.setConstant(128.0);
        } else {
          v = (v.array() - lo) * (255.0 / (hi - lo));
        }

        Raster img;
        img.width = p.cols;
        img.height = p.rows;
        img.channels = 1;
        img.data.resize(static_cast<std::size_t>(t));
        // Inverse of vectorize: vector index col * rows + row.
        for (int col = 0; col < p.cols; ++col)
          for (int row = 0; row < p.rows; ++row)
            img.at(row, col) = v(static_cast<Eigen::Index>(col) * p.rows + row);
        save_pgm(img, (set_dir / ("img" + pad4(i) + ".pgm")).string());
      }
    }
  }

  nlohmann::json record;
  record["format"] = "lrcset-synthetic-v1";
  record["classes"] = p.classes;
  record["sets_per_class"] = p.sets_per_class;
  record["images_per_set"] = p.images_per_set;
  record["dims"] = {p.rows, p.cols};
  record["rank"] = p.rank;
  record["sigma"] = p.sigma;
  record["seed"] = p.seed;
  std::ofstream out(fs::path(out_dir) / "synthetic.json");
  if (!out) throw IoError("cannot write ground-truth record under " + out_dir);
  out << record.dump(2) << "\n";
}

}  // namespace lrcset
