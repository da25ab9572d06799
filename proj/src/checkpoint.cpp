#include "varndrr/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace varndrr {

namespace {

constexpr char kMagic[8] = {'V', 'N', 'D', 'R', 'R', 'C', 'K', '1'};

void put_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void put_u64(std::ostream& out, std::uint64_t v) { put_bytes(out, &v, sizeof(v)); }
void put_u32(std::ostream& out, std::uint32_t v) { put_bytes(out, &v, sizeof(v)); }
void put_u8(std::ostream& out, std::uint8_t v) { put_bytes(out, &v, sizeof(v)); }
void put_f64(std::ostream& out, double v) { put_bytes(out, &v, sizeof(v)); }

void put_string(std::ostream& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  put_bytes(out, s.data(), s.size());
}

struct Reader {
  std::ifstream in;
  std::string path;

  void bytes(void* data, std::size_t n) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw DataError("truncated or unreadable checkpoint: " + path);
    }
  }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, sizeof(v)); return v; }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, sizeof(v)); return v; }
  std::uint8_t u8() { std::uint8_t v; bytes(&v, sizeof(v)); return v; }
  double f64() { double v; bytes(&v, sizeof(v)); return v; }
  std::string string() {
    std::string s(u32(), '\0');
    bytes(s.data(), s.size());
    return s;
  }
};

void write_dims(std::ostream& out, const DimensionsConfig& d) {
  for (std::size_t v : {d.d_z, d.d_x1, d.d_x2, d.d_h1, d.d_h2, d.d_hy, d.d_h1p, d.d_h2p,
                        d.d_m, d.d_y}) {
    put_u64(out, v);
  }
}

DimensionsConfig read_dims(Reader& r) {
  DimensionsConfig d;
  for (std::size_t* v : {&d.d_z, &d.d_x1, &d.d_x2, &d.d_h1, &d.d_h2, &d.d_hy, &d.d_h1p,
                         &d.d_h2p, &d.d_m, &d.d_y}) {
    *v = static_cast<std::size_t>(r.u64());
  }
  return d;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const Vocabulary& vocab, Relation task, std::uint64_t seed,
                     const AdamState* adam) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path.string());

  put_bytes(out, kMagic, sizeof(kMagic));
  write_dims(out, params.dims);
  put_u64(out, seed);
  put_u8(out, static_cast<std::uint8_t>(task));

  put_u64(out, vocab.size());
  put_u64(out, vocab.tokens().size());
  for (const std::string& token : vocab.tokens()) put_string(out, token);

  const auto views = params.trainable_arrays();
  put_u64(out, views.size());
  for (const ConstArrayView& view : views) {
    put_string(out, view.name);
    put_u64(out, view.rows);
    put_u64(out, view.cols);
    put_bytes(out, view.data, view.size() * sizeof(double));
  }

  put_u8(out, adam ? 1 : 0);
  if (adam) {
    if (adam->m.size() != views.size() || adam->v.size() != views.size()) {
      throw DataError("save_checkpoint: Adam state does not match the parameter arrays");
    }
    put_u64(out, adam->step);
    put_f64(out, adam->alpha);
    put_f64(out, adam->beta1);
    put_f64(out, adam->beta2);
    put_f64(out, adam->eps_hat);
    for (std::size_t a = 0; a < views.size(); ++a) {
      put_u64(out, adam->m[a].size());
      put_bytes(out, adam->m[a].data(), adam->m[a].size() * sizeof(double));
      put_bytes(out, adam->v[a].data(), adam->v[a].size() * sizeof(double));
    }
  }
  if (!out) throw DataError("write failed: " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r{std::ifstream(path, std::ios::binary), path.string()};
  if (!r.in) throw DataError("cannot open checkpoint: " + path.string());

  char magic[sizeof(kMagic)];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a checkpoint file (bad magic): " + path.string());
  }

  const DimensionsConfig dims = read_dims(r);
  dims.validate();

  LoadedCheckpoint loaded;
  loaded.seed = r.u64();
  const std::uint8_t task_byte = r.u8();
  if (task_byte > 3) throw DataError("checkpoint: bad relation tag byte");
  loaded.task = static_cast<Relation>(task_byte);

  const std::uint64_t vocab_dim = r.u64();
  const std::uint64_t token_count = r.u64();
  if (vocab_dim != dims.d_x1) {
    throw DataError("checkpoint: vocabulary dimension " + std::to_string(vocab_dim) +
                    " does not match d_x1 = " + std::to_string(dims.d_x1));
  }
  std::vector<std::string> tokens;
  tokens.reserve(token_count);
  for (std::uint64_t i = 0; i < token_count; ++i) tokens.push_back(r.string());
  loaded.vocab = Vocabulary(std::move(tokens), static_cast<std::size_t>(vocab_dim));

  loaded.params = allocate_params(dims);
  const auto views = loaded.params.trainable_arrays();
  const std::uint64_t array_count = r.u64();
  if (array_count != views.size()) {
    throw DataError("checkpoint: expected " + std::to_string(views.size()) +
                    " parameter arrays, found " + std::to_string(array_count));
  }
  for (const ArrayView& view : views) {
    const std::string name = r.string();
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (name != view.name) {
      throw DataError("checkpoint: expected array '" + std::string(view.name) + "', found '" +
                      name + "'");
    }
    if (rows != view.rows || cols != view.cols) {
      throw DataError("checkpoint: array '" + name + "' has shape " + std::to_string(rows) +
                      "x" + std::to_string(cols) + ", expected " + std::to_string(view.rows) +
                      "x" + std::to_string(view.cols));
    }
    r.bytes(view.data, view.size() * sizeof(double));
  }

  if (r.u8() == 1) {
    AdamState adam;
    adam.step = static_cast<std::size_t>(r.u64());
    adam.alpha = r.f64();
    adam.beta1 = r.f64();
    adam.beta2 = r.f64();
    adam.eps_hat = r.f64();
    for (const ArrayView& view : views) {
      const std::uint64_t n = r.u64();
      if (n != view.size()) {
        throw DataError("checkpoint: Adam moments for '" + std::string(view.name) +
                        "' have length " + std::to_string(n) + ", expected " +
                        std::to_string(view.size()));
      }
      std::vector<double> m(n), v(n);
      r.bytes(m.data(), n * sizeof(double));
      r.bytes(v.data(), n * sizeof(double));
      adam.m.push_back(std::move(m));
      adam.v.push_back(std::move(v));
    }
    loaded.adam = std::move(adam);
  }
  return loaded;
}

}  // namespace varndrr
