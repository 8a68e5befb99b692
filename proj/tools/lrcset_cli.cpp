// Command-line front end for the lrcset shared library. Talks to the core
// exclusively through the C API in lrcset/lrcset.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrcset/lrcset.h"

namespace {

struct Dims {
  int rows = 0;
  int cols = 0;
};

// "40x40" -> rows 40, cols 40
Dims parse_dims(const std::string& text) {
  Dims d;
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    d.rows = std::stoi(text.substr(0, x));
    d.cols = std::stoi(text.substr(x + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--dims", "expected AxB, e.g. 40x40, got '" + text + "'");
  }
  if (d.rows < 1 || d.cols < 1)
    throw CLI::ValidationError("--dims", "dimensions must be positive");
  return d;
}

[[noreturn]] void die(lrcset_status status) {
  std::cerr << "error (" << lrcset_status_name(status) << "): " << lrcset_last_error() << "\n";
  std::exit(1);
}

void check(lrcset_status status) {
  if (status != LRCSET_OK) die(status);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read config file " << path << "\n";
    std::exit(1);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int vote_strategy_code(const std::string& name) {
  if (name == "exponential") return LRCSET_VOTE_EXPONENTIAL;
  if (name == "majority") return LRCSET_VOTE_MAJORITY;
  return LRCSET_VOTE_KNN;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lrcset — image set classification by least-squares subspace reconstruction"};
  app.set_version_flag("--version", std::string(lrcset_version()));
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Generate a synthetic PGM corpus");
  int s_classes = 4, s_sets = 4, s_images = 20, s_rank = 5;
  std::string s_dims = "16x16", s_out;
  double s_sigma = 0.0;
  std::uint64_t s_seed = 0;
  synth->add_option("--classes", s_classes, "Number of classes")->check(CLI::PositiveNumber);
  synth->add_option("--sets", s_sets, "Image sets per class")->check(CLI::PositiveNumber);
  synth->add_option("--images", s_images, "Images per set")->check(CLI::PositiveNumber);
  synth->add_option("--dims", s_dims, "Image resolution AxB");
  synth->add_option("--rank", s_rank, "Class subspace dimension")->check(CLI::PositiveNumber);
  synth->add_option("--sigma", s_sigma, "Additive Gaussian noise level");
  synth->add_option("--seed", s_seed, "RNG seed");
  synth->add_option("--out", s_out, "Output corpus directory")->required();

  // ---- build-gallery ----
  auto* build = app.add_subcommand("build-gallery", "Form a gallery from a corpus and save it");
  std::string b_data, b_out, b_dims = "", b_remedy = "perturb";
  int b_images = 0;
  bool b_equalize = false, b_standardize = false;
  std::uint64_t b_seed = 0;
  build->add_option("--data", b_data, "Corpus root (root/<class>/<set>/<images>)")->required();
  build->add_option("--dims", b_dims, "Downsampled resolution AxB")->required();
  build->add_option("--gallery-images", b_images, "Images sampled per class (0 = all)");
  build->add_option("--remedy", b_remedy, "Rank-deficiency remedy")
      ->check(CLI::IsMember({"perturb", "qr"}));
  build->add_flag("--equalize", b_equalize, "Apply histogram equalization");
  build->add_flag("--standardize", b_standardize, "Standardize each image vector");
  build->add_option("--seed", b_seed, "RNG seed for gallery sampling");
  build->add_option("--out", b_out, "Gallery output file")->required();

  // ---- classify ----
  auto* classify = app.add_subcommand("classify", "Classify one image set against a gallery");
  std::string c_gallery, c_set, c_strategy = "exponential";
  double c_alpha = -1.0;
  int c_k = 1;
  bool c_json = false, c_distances = false;
  classify->add_option("--gallery", c_gallery, "Gallery file from build-gallery")->required();
  classify->add_option("--set", c_set, "Directory holding the test images")->required();
  classify->add_option("--alpha", c_alpha, "Exponential weight decay rate");
  classify->add_option("--strategy", c_strategy, "Voting strategy")
      ->check(CLI::IsMember({"exponential", "majority", "knn"}));
  classify->add_option("--k", c_k, "Neighbour count for knn (odd)");
  classify->add_flag("--json", c_json, "Emit the result as JSON");
  classify->add_flag("--distances", c_distances, "Include the distance matrix (JSON only)");

  // ---- benchmark ----
  auto* bench = app.add_subcommand("benchmark", "Run the split-and-repeat evaluation protocol");
  std::string n_data, n_preset = "custom", n_mode = "fast", n_report, n_format = "json";
  std::string n_dims, n_strategy, n_remedy, n_config;
  int n_repeats = -1, n_k = -1, n_gsets = -1, n_gimages = -1;
  double n_alpha = -1.0;
  bool n_equalize = false, n_standardize = false;
  std::uint64_t n_seed = 0;
  bool n_seed_given = false;
  bench->add_option("--data", n_data, "Corpus root")->required();
  bench->add_option("--preset", n_preset, "Parameter bundle")
      ->check(CLI::IsMember({"mobo", "ytc", "honda", "eth80", "custom"}));
  bench->add_option("--mode", n_mode, "Solver path")->check(CLI::IsMember({"fast", "naive"}));
  bench->add_option("--repeats", n_repeats, "Number of random splits");
  bench->add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t v) { n_seed = v; n_seed_given = true; }, "Master seed");
  bench->add_option("--report", n_report, "Report output file");
  bench->add_option("--format", n_format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  bench->add_option("--config", n_config, "JSON config file (flags override its keys)");
  bench->add_option("--dims", n_dims, "Resolution AxB (custom preset)");
  bench->add_option("--alpha", n_alpha, "Exponential weight decay rate");
  bench->add_option("--strategy", n_strategy, "Voting strategy")
      ->check(CLI::IsMember({"exponential", "majority", "knn"}));
  bench->add_option("--k", n_k, "Neighbour count for knn (odd)");
  bench->add_option("--gallery-sets", n_gsets, "Gallery sets per class");
  bench->add_option("--gallery-images", n_gimages, "Gallery images sampled per set (0 = all)");
  bench->add_option("--remedy", n_remedy, "Rank-deficiency remedy")
      ->check(CLI::IsMember({"perturb", "qr"}));
  bench->add_flag("--equalize", n_equalize, "Apply histogram equalization");
  bench->add_flag("--standardize", n_standardize, "Standardize each image vector");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    const Dims d = parse_dims(s_dims);
    lrcset_synth_options opt{};
    opt.classes = s_classes;
    opt.sets_per_class = s_sets;
    opt.images_per_set = s_images;
    opt.rows = d.rows;
    opt.cols = d.cols;
    opt.rank = s_rank;
    opt.sigma = s_sigma;
    opt.seed = s_seed;
    check(lrcset_synth_generate(&opt, s_out.c_str()));
    std::cout << "wrote " << s_classes * s_sets * s_images << " images to " << s_out << "\n";
    return 0;
  }

  if (build->parsed()) {
    const Dims d = parse_dims(b_dims);
    lrcset_gallery_options opt{};
    opt.rows = d.rows;
    opt.cols = d.cols;
    opt.equalize = b_equalize ? 1 : 0;
    opt.standardize = b_standardize ? 1 : 0;
    opt.gallery_images = b_images;
    opt.remedy = b_remedy == "qr" ? LRCSET_REMEDY_QR : LRCSET_REMEDY_PERTURB;
    opt.seed = b_seed;
    lrcset_gallery* gallery = nullptr;
    check(lrcset_gallery_build(b_data.c_str(), &opt, &gallery));
    check(lrcset_gallery_save(gallery, b_out.c_str()));
    std::cout << "gallery with " << lrcset_gallery_class_count(gallery) << " classes saved to "
              << b_out << "\n";
    lrcset_gallery_free(gallery);
    return 0;
  }

  if (classify->parsed()) {
    if (c_strategy == "exponential" && c_alpha <= 0.0) {
      std::cerr << "error: --alpha (positive) is required for the exponential strategy\n";
      return 1;
    }
    lrcset_gallery* gallery = nullptr;
    check(lrcset_gallery_load(c_gallery.c_str(), &gallery));
    lrcset_vote_options vote{};
    vote.strategy = vote_strategy_code(c_strategy);
    vote.alpha = c_alpha;
    vote.k = c_k;
    lrcset_result* result = nullptr;
    check(lrcset_classify_dir(gallery, c_set.c_str(), &vote, &result));
    if (c_json) {
      char* json = nullptr;
      check(lrcset_result_json(result, c_distances ? 1 : 0, &json));
      std::cout << json;
      lrcset_string_free(json);
    } else {
      std::cout << "set:       " << c_set << "\n";
      std::cout << "images:    " << lrcset_result_image_count(result) << "\n";
      std::cout << "predicted: " << lrcset_result_predicted_label(result)
                << (lrcset_result_tie(result) ? "  (tie, lowest index kept)" : "") << "\n";
      std::cout << "scores:\n";
      for (int c = 0; c < lrcset_result_class_count(result); ++c)
        std::printf("  %-24s %.6f\n", lrcset_gallery_label(gallery, c),
                    lrcset_result_theta(result, c));
    }
    lrcset_result_free(result);
    lrcset_gallery_free(gallery);
    return 0;
  }

  // benchmark
  nlohmann::json config = nlohmann::json::object();
  if (!n_config.empty()) {
    try {
      config = nlohmann::json::parse(read_file(n_config));
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: invalid config file " << n_config << ": " << e.what() << "\n";
      return 1;
    }
  }
  if (bench->count("--preset") || !config.contains("preset")) config["preset"] = n_preset;
  if (bench->count("--mode") || !config.contains("mode")) config["mode"] = n_mode;
  if (n_repeats >= 0) config["repeats"] = n_repeats;
  if (n_seed_given || !config.contains("seed")) config["seed"] = n_seed;
  if (!n_dims.empty()) {
    const Dims d = parse_dims(n_dims);
    config["dims"] = {d.rows, d.cols};
  }
  if (n_alpha > 0.0) config["alpha"] = n_alpha;
  if (!n_strategy.empty()) config["strategy"] = n_strategy;
  if (n_k > 0) config["k"] = n_k;
  if (n_gsets > 0) config["gallery_sets_per_class"] = n_gsets;
  if (n_gimages >= 0) config["gallery_images_per_set"] = n_gimages;
  if (!n_remedy.empty()) config["remedy"] = n_remedy;
  if (n_equalize) config["equalize"] = true;
  if (n_standardize) config["standardize"] = true;

  char* report = nullptr;
  check(lrcset_benchmark_run(n_data.c_str(), config.dump().c_str(), &report));

  const auto doc = nlohmann::json::parse(report);
  const auto& summary = doc["summary"];
  std::printf("accuracy: %.4f +- %.4f over %zu repeats\n",
              summary["mean_accuracy"].get<double>(), summary["std_accuracy"].get<double>(),
              doc["repeats"].size());
  std::printf("gallery formation: %.4f s mean; classification: %.6f s mean per set\n",
              summary["mean_gallery_seconds"].get<double>(),
              summary["mean_set_seconds"].get<double>());

  if (!n_report.empty()) {
    std::ofstream out(n_report, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write report file " << n_report << "\n";
      lrcset_string_free(report);
      return 1;
    }
    if (n_format == "json") {
      out << report;
    } else {
      char* csv = nullptr;
      check(lrcset_report_to_csv(report, &csv));
      out << csv;
      lrcset_string_free(csv);
    }
    std::cout << "report written to " << n_report << "\n";
  }
  lrcset_string_free(report);
  return 0;
}
