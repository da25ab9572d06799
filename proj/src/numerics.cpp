#include "varndrr/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace varndrr {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

[[noreturn]] void throw_shape(const std::string& what) { throw ShapeError(what); }

}  // namespace

RngState::RngState(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

RngState RngState::fork(std::uint64_t salt) const {
  return RngState(splitmix64(seed_ ^ splitmix64(salt)));
}

double RngState::uniform01() {
  // 53 random mantissa bits -> [0, 1)
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

std::size_t RngState::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be >= 1");
  const std::uint64_t bound = n;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t raw;
  do {
    raw = gen_();
  } while (raw >= limit);
  return static_cast<std::size_t>(raw % bound);
}

void RngState::fill_gaussian(std::span<double> out, double mean, double stddev) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::size_t i = 0;
  while (i < out.size()) {
    // Box-Muller; u1 in (0, 1] keeps the log finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    out[i++] = mean + stddev * radius * std::cos(kTwoPi * u2);
    if (i < out.size()) {
      out[i++] = mean + stddev * radius * std::sin(kTwoPi * u2);
    }
  }
}

DenseVector affine(const DenseMatrix& w, const DenseVector& v, const DenseVector& b) {
  if (w.cols != v.dim() || w.rows != b.dim()) {
    throw_shape("affine: W is " + std::to_string(w.rows) + "x" + std::to_string(w.cols) +
                ", v has dim " + std::to_string(v.dim()) + ", b has dim " +
                std::to_string(b.dim()));
  }
  DenseVector out(w.rows);
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double* row = w.data.data() + i * w.cols;
    double sum = 0.0;
    for (std::size_t j = 0; j < w.cols; ++j) sum += row[j] * v.data[j];
    out.data[i] = sum + b.data[i];
  }
  return out;
}

DenseVector tanh_vec(const DenseVector& v) {
  DenseVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out.data[i] = std::tanh(v.data[i]);
  return out;
}

DenseVector sigmoid_vec(const DenseVector& v) {
  DenseVector out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) {
    const double x = v.data[i];
    if (x >= 0.0) {
      out.data[i] = 1.0 / (1.0 + std::exp(-x));
    } else {
      const double e = std::exp(x);
      out.data[i] = e / (1.0 + e);
    }
  }
  return out;
}

DenseVector softmax_vec(const DenseVector& v) {
  DenseVector out(v.dim());
  if (v.dim() == 0) return out;
  const double peak = *std::max_element(v.data.begin(), v.data.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    out.data[i] = std::exp(v.data[i] - peak);
    sum += out.data[i];
  }
  for (double& x : out.data) x /= sum;
  return out;
}

DenseVector sample_standard_gaussian(RngState& rng, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("sample_standard_gaussian: dim must be >= 1");
  DenseVector out(dim);
  rng.fill_gaussian(out.data, 0.0, 1.0);
  return out;
}

DenseVector matvec_transposed(const DenseMatrix& w, const DenseVector& v) {
  if (w.rows != v.dim()) {
    throw_shape("matvec_transposed: W is " + std::to_string(w.rows) + "x" +
                std::to_string(w.cols) + ", v has dim " + std::to_string(v.dim()));
  }
  DenseVector out(w.cols);
  for (std::size_t i = 0; i < w.rows; ++i) {
    const double* row = w.data.data() + i * w.cols;
    const double vi = v.data[i];
    for (std::size_t j = 0; j < w.cols; ++j) out.data[j] += row[j] * vi;
  }
  return out;
}

void add_outer(DenseMatrix& acc, const DenseVector& u, const DenseVector& v) {
  if (acc.rows != u.dim() || acc.cols != v.dim()) {
    throw_shape("add_outer: acc is " + std::to_string(acc.rows) + "x" +
                std::to_string(acc.cols) + ", u has dim " + std::to_string(u.dim()) +
                ", v has dim " + std::to_string(v.dim()));
  }
  for (std::size_t i = 0; i < acc.rows; ++i) {
    double* row = acc.data.data() + i * acc.cols;
    const double ui = u.data[i];
    for (std::size_t j = 0; j < acc.cols; ++j) row[j] += ui * v.data[j];
  }
}

void add_scaled(DenseVector& acc, const DenseVector& v, double scale) {
  if (acc.dim() != v.dim()) {
    throw_shape("add_scaled: dims " + std::to_string(acc.dim()) + " vs " +
                std::to_string(v.dim()));
  }
  for (std::size_t i = 0; i < acc.dim(); ++i) acc.data[i] += scale * v.data[i];
}

}  // namespace varndrr
