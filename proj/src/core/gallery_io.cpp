#include "core/gallery_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "core/errors.hpp"

namespace lrcset {

namespace {

constexpr char kMagic[4] = {'L', 'R', 'C', 'G'};
constexpr std::uint8_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw IoError("cannot write gallery file: " + path);
  }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) {
    std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                         static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
    raw(b, 4);
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) {
    u32(static_cast<std::uint32_t>(v));
    u32(static_cast<std::uint32_t>(v >> 32));
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void bytes(const void* p, std::size_t n) { raw(p, n); }
  void matrix(const Eigen::MatrixXd& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) f64(m(i, j));
  }
  void finish() {
    out_.flush();
    if (!out_) throw IoError("failed writing gallery file: " + path_);
  }

 private:
  void raw(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  std::ofstream out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open gallery file: " + path);
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    const auto* b = take(4);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return lo | (hi << 32);
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str(std::size_t n) {
    const auto* b = take(n);
    return std::string(reinterpret_cast<const char*>(b), n);
  }
  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = f64();
    return m;
  }
  bool exhausted() const { return pos_ == buf_.size(); }

 private:
  const std::uint8_t* take(std::size_t n) {
    if (buf_.size() - pos_ < n) throw IoError("truncated gallery file: " + path_);
    const std::uint8_t* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
  std::string path_;
};

}  // namespace

void save_gallery(const Gallery& g, const std::string& path) {
  if (g.regressors.empty()) throw InvalidInput("save_gallery: empty gallery");
  Writer w(path);
  w.bytes(kMagic, 4);
  w.u8(kVersion);
  std::uint8_t flags = 0;
  if (g.preprocess.equalize) flags |= 1;
  if (g.preprocess.standardize) flags |= 2;
  w.u8(flags);
  w.u32(static_cast<std::uint32_t>(g.preprocess.rows));
  w.u32(static_cast<std::uint32_t>(g.preprocess.cols));
  w.u32(static_cast<std::uint32_t>(g.regressors.size()));
  for (std::size_t c = 0; c < g.regressors.size(); ++c) {
    const Regressor& reg = g.regressors[c];
    w.i32(reg.class_id);
    const std::string& label = g.labels[c];
    w.u32(static_cast<std::uint32_t>(label.size()));
    w.bytes(label.data(), label.size());
    w.u32(static_cast<std::uint32_t>(reg.columns()));
    w.u64(static_cast<std::uint64_t>(reg.rank));
    w.u8(reg.perturbed ? 1 : 0);
    w.u64(reg.perturb_seed);
    w.matrix(reg.Q);
    w.u8(reg.pinv ? 1 : 0);
    if (reg.pinv) w.matrix(*reg.pinv);
  }
  w.finish();
}

Gallery load_gallery(const std::string& path) {
  Reader r(path);
  if (r.str(4) != std::string(kMagic, 4)) throw IoError("not a gallery file: " + path);
  const std::uint8_t version = r.u8();
  if (version != kVersion)
    throw IoError("unsupported gallery format version " + std::to_string(version) + " in " + path);

  Gallery g;
  const std::uint8_t flags = r.u8();
  g.preprocess.equalize = flags & 1;
  g.preprocess.standardize = flags & 2;
  g.preprocess.rows = static_cast<int>(r.u32());
  g.preprocess.cols = static_cast<int>(r.u32());
  const Eigen::Index t = static_cast<Eigen::Index>(g.preprocess.rows) * g.preprocess.cols;

  const std::uint32_t count = r.u32();
  if (count == 0) throw IoError("gallery file has no classes: " + path);
  g.regressors.reserve(count);
  g.labels.reserve(count);
  for (std::uint32_t c = 0; c < count; ++c) {
    Regressor reg;
    reg.class_id = r.i32();
    g.labels.push_back(r.str(r.u32()));
    const Eigen::Index n = static_cast<Eigen::Index>(r.u32());
    reg.rank = static_cast<Eigen::Index>(r.u64());
    reg.perturbed = r.u8() != 0;
    reg.perturb_seed = r.u64();
    reg.Q = r.matrix(t, n);
    if (r.u8() != 0) reg.pinv = r.matrix(n, t);
    g.regressors.push_back(std::move(reg));
  }
  if (!r.exhausted()) throw IoError("trailing bytes in gallery file: " + path);
  return g;
}

}  // namespace lrcset
