#include "dmpred/neuro/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

namespace dmpred::nn {
namespace {

constexpr char kMagic[8] = {'D', 'M', 'P', 'R', 'N', 'N', '\r', '\n'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <class T>
  void integer(T v) {
    unsigned char b[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), sizeof b);
  }
  void text(std::string_view s) {
    integer(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void f32(double v) { integer(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}
  template <class T>
  T integer() {
    unsigned char b[sizeof(T)];
    read(reinterpret_cast<char*>(b), sizeof b);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
    return v;
  }
  std::string text() {
    const auto n = integer<std::uint32_t>();
    if (n > (1u << 28)) fail("implausible string length");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  double f32() { return std::bit_cast<float>(integer<std::uint32_t>()); }
  void read(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) fail("truncated file");
  }
  [[noreturn]] void fail(const std::string& what) { throw std::runtime_error(source_ + ": " + what); }

 private:
  std::istream& in_;
  std::string source_;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_param_file(const std::filesystem::path& path, std::string_view config, const ParamList& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  Writer w(out);
  out.write(kMagic, sizeof kMagic);
  w.integer(kParamFileVersion);
  w.integer(fnv1a64(config));
  w.text(config);
  w.integer(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.text(p.name);
    w.integer(static_cast<std::uint32_t>(p.tensor.rows()));
    w.integer(static_cast<std::uint32_t>(p.tensor.cols()));
  }
  for (const auto& p : params) {
    for (double v : p.tensor.value().data) w.f32(v);
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ParamFile read_param_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  Reader r(in, path.string());
  char magic[sizeof kMagic];
  r.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) r.fail("not a dmpred parameter file");
  const auto version = r.integer<std::uint32_t>();
  if (version != kParamFileVersion) r.fail("unsupported version " + std::to_string(version));
  ParamFile file;
  file.config_digest = r.integer<std::uint64_t>();
  file.config = r.text();
  if (fnv1a64(file.config) != file.config_digest) r.fail("config digest mismatch");
  const auto count = r.integer<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    StoredTensor t;
    t.name = r.text();
    const auto rows = r.integer<std::uint32_t>();
    const auto cols = r.integer<std::uint32_t>();
    if (static_cast<std::uint64_t>(rows) * cols > (1ull << 31)) r.fail("implausible tensor shape");
    t.value = Matrix(rows, cols);
    file.tensors.push_back(std::move(t));
  }
  for (auto& t : file.tensors) {
    for (double& v : t.value.data) v = r.f32();
  }
  return file;
}

void load_into(const ParamFile& file, const ParamList& params) {
  std::map<std::string_view, const Matrix*> by_name;
  for (const auto& t : file.tensors) by_name[t.name] = &t.value;
  for (const auto& p : params) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) throw std::runtime_error("model file lacks parameter " + p.name);
    if (!it->second->same_shape(p.tensor.value())) {
      throw ShapeError("parameter " + p.name + ": stored " + it->second->shape_str() + ", expected " +
                       p.tensor.value().shape_str());
    }
    Tensor t = p.tensor;
    t.mutable_value() = *it->second;
  }
  if (by_name.size() != params.size()) throw std::runtime_error("model file has unexpected extra parameters");
}

}  // namespace dmpred::nn
