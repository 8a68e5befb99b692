#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lrcset {

struct SetEntry {
  std::string set_id;               // directory name
  std::vector<std::string> files;   // full paths, lexicographically sorted
};

struct ClassEntry {
  std::string label;
  std::vector<SetEntry> sets;
};

/// Enumeration of a corpus laid out as root/<class>/<set>/<image files>.
struct DatasetManifest {
  std::string root;
  std::vector<ClassEntry> classes;
  std::size_t image_count = 0;
};

/// Scans the corpus directory. Classes, sets and files are ordered
/// lexicographically; every file inside a set must be a readable image.
/// Regular files directly under the root are ignored (corpus metadata lives
/// there), everything deeper is validated strictly.
DatasetManifest ingest_dataset(const std::string& root);

struct SynthParams {
  int classes = 0;
  int sets_per_class = 0;
  int images_per_set = 0;
  int rows = 0, cols = 0;     // image resolution
  int rank = 0;               // dimension of each class subspace
  double sigma = 0.0;         // additive Gaussian noise level
  std::uint64_t seed = 0;
};

/// Writes a PGM corpus in the ingestion layout plus a ground-truth record
/// (synthetic.json) at the corpus root. Every image is a random point of its
/// class subspace, optionally noised, then affinely mapped to 0..255. The
/// per-image mapping adds the constant direction, so the observed subspace
/// of each class has dimension rank + 1.
void generate_synthetic(const SynthParams& p, const std::string& out_dir);

}  // namespace lrcset
