#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace varndrr {

// Thrown when operand shapes do not line up.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DenseVector {
  std::vector<double> data;

  DenseVector() = default;
  explicit DenseVector(std::size_t dim, double fill = 0.0) : data(dim, fill) {}
  DenseVector(std::initializer_list<double> values) : data(values) {}

  std::size_t dim() const { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
};

// Row-major dense matrix of doubles. data.size() == rows * cols.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Seeded random source passed around by explicit reference; there is no
// global generator. The same seed and the same call sequence produce the
// same values on any platform: the raw stream comes from std::mt19937_64
// (bit-exact per the standard) and all distributions are derived from it
// explicitly here, not through std::*_distribution, whose output is
// implementation-defined.
//
// Single-owner: an RngState must not be used from two threads at once.
class RngState {
 public:
  explicit RngState(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Independent generator determined by (seed, salt) only; the current
  // stream position is irrelevant. Callers pick distinct salts.
  RngState fork(std::uint64_t salt) const;

  double uniform01();                        // [0, 1)
  std::size_t uniform_index(std::size_t n);  // unbiased draw from [0, n), n >= 1
  void fill_gaussian(std::span<double> out, double mean, double stddev);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    if (items.size() < 2) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
      std::swap(items[i], items[uniform_index(i + 1)]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

// w * v + b
DenseVector affine(const DenseMatrix& w, const DenseVector& v, const DenseVector& b);
DenseVector tanh_vec(const DenseVector& v);
DenseVector sigmoid_vec(const DenseVector& v);
// Max-subtracted softmax; output sums to 1 and never overflows.
DenseVector softmax_vec(const DenseVector& v);
// dim i.i.d. draws from N(0, 1). dim must be >= 1.
DenseVector sample_standard_gaussian(RngState& rng, std::size_t dim);

// Helpers for the hand-written backward passes.
DenseVector matvec_transposed(const DenseMatrix& w, const DenseVector& v);  // w^T * v
void add_outer(DenseMatrix& acc, const DenseVector& u, const DenseVector& v);  // acc += u v^T
void add_scaled(DenseVector& acc, const DenseVector& v, double scale = 1.0);

}  // namespace varndrr
