#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "varndrr/numerics.hpp"

namespace varndrr {

// All layer sizes of the model. The defaults are the full-scale
// configuration; small runs override them.
struct DimensionsConfig {
  std::size_t d_z = 20;                     // latent dimension
  std::size_t d_x1 = 10001, d_x2 = 10001;   // argument vocabulary dimensions
  std::size_t d_h1 = 400, d_h2 = 400;       // encoder hidden (posterior and prior)
  std::size_t d_hy = 400;                   // posterior hidden for the label
  std::size_t d_h1p = 400, d_h2p = 400;     // decoder hidden
  std::size_t d_m = 400;                    // relation MLP width
  std::size_t d_y = 2;                      // one-vs-all, positive first

  // Throws ShapeError when a dimension is zero or when the tied matrices
  // would need incompatible shapes (tying forces d_x1==d_x2, d_h1==d_h2
  // and d_h1p==d_h2p).
  void validate() const;
};

// Decoder parameters (the generative side). W_xp is shared by both
// argument output layers: one matrix, one gradient accumulator.
struct GenerativeParams {
  DenseMatrix W_h1p;  // d_h1p x d_z
  DenseVector b_h1p;
  DenseMatrix W_h2p;  // d_h2p x d_z
  DenseVector b_h2p;
  DenseMatrix W_xp;   // d_x1 x d_h1p, tied output transform for x1' and x2'
  DenseVector b_x1p;
  DenseVector b_x2p;
  std::array<DenseMatrix, 4> W_mlp;  // d_m x d_z, then d_m x d_m
  std::array<DenseVector, 4> b_mlp;
  DenseMatrix W_yp;   // d_y x d_m
  DenseVector b_yp;
};

// Posterior approximator, conditioned on (x1, x2, y). W_h is shared by
// the two argument hidden layers.
struct PosteriorParams {
  DenseMatrix W_h;    // d_h1 x d_x1, tied hidden transform for x1 and x2
  DenseVector b_h1;
  DenseVector b_h2;
  DenseMatrix W_hy;   // d_hy x d_y
  DenseVector b_hy;
  DenseMatrix W_mu1, W_mu2, W_muy;   // d_z x d_h*
  DenseVector b_mu;
  DenseMatrix W_sig1, W_sig2, W_sigy;
  DenseVector b_sig;
};

// Prior approximator, conditioned on (x1, x2) alone. Every array here is
// independent storage; nothing is shared with the posterior or tied
// internally.
struct PriorParams {
  DenseMatrix W_h1;   // d_h1 x d_x1
  DenseVector b_h1;
  DenseMatrix W_h2;   // d_h2 x d_x2
  DenseVector b_h2;
  DenseMatrix W_mu1, W_mu2;
  DenseVector b_mu;
  DenseMatrix W_sig1, W_sig2;
  DenseVector b_sig;
};

struct ApproximatorParams {
  PosteriorParams posterior;
  PriorParams prior;
};

// Diagonal Gaussian over z: mean and log-variance, both d_z long.
// The standard deviation is exp(0.5 * log_var).
struct GaussianParams {
  DenseVector mu;
  DenseVector log_var;
};

struct ArrayView {
  std::string_view name;
  double* data;
  std::size_t rows, cols;  // cols == 1 for bias vectors
  std::size_t size() const { return rows * cols; }
};

struct ConstArrayView {
  std::string_view name;
  const double* data;
  std::size_t rows, cols;
  std::size_t size() const { return rows * cols; }
};

// Visits every distinct trainable array exactly once, in a fixed order
// that is identical for parameters and gradients. Tied matrices appear
// once. fn(name, DenseMatrix&) / fn(name, DenseVector&).
template <typename Theta, typename Phi, typename Fn>
void visit_parameter_arrays(Theta& theta, Phi& phi, Fn&& fn) {
  fn("theta.W_h1p", theta.W_h1p);
  fn("theta.b_h1p", theta.b_h1p);
  fn("theta.W_h2p", theta.W_h2p);
  fn("theta.b_h2p", theta.b_h2p);
  fn("theta.W_xp", theta.W_xp);
  fn("theta.b_x1p", theta.b_x1p);
  fn("theta.b_x2p", theta.b_x2p);
  fn("theta.W_mlp1", theta.W_mlp[0]);
  fn("theta.b_mlp1", theta.b_mlp[0]);
  fn("theta.W_mlp2", theta.W_mlp[1]);
  fn("theta.b_mlp2", theta.b_mlp[1]);
  fn("theta.W_mlp3", theta.W_mlp[2]);
  fn("theta.b_mlp3", theta.b_mlp[2]);
  fn("theta.W_mlp4", theta.W_mlp[3]);
  fn("theta.b_mlp4", theta.b_mlp[3]);
  fn("theta.W_yp", theta.W_yp);
  fn("theta.b_yp", theta.b_yp);
  fn("phi.post.W_h", phi.posterior.W_h);
  fn("phi.post.b_h1", phi.posterior.b_h1);
  fn("phi.post.b_h2", phi.posterior.b_h2);
  fn("phi.post.W_hy", phi.posterior.W_hy);
  fn("phi.post.b_hy", phi.posterior.b_hy);
  fn("phi.post.W_mu1", phi.posterior.W_mu1);
  fn("phi.post.W_mu2", phi.posterior.W_mu2);
  fn("phi.post.W_muy", phi.posterior.W_muy);
  fn("phi.post.b_mu", phi.posterior.b_mu);
  fn("phi.post.W_sig1", phi.posterior.W_sig1);
  fn("phi.post.W_sig2", phi.posterior.W_sig2);
  fn("phi.post.W_sigy", phi.posterior.W_sigy);
  fn("phi.post.b_sig", phi.posterior.b_sig);
  fn("phi.prior.W_h1", phi.prior.W_h1);
  fn("phi.prior.b_h1", phi.prior.b_h1);
  fn("phi.prior.W_h2", phi.prior.W_h2);
  fn("phi.prior.b_h2", phi.prior.b_h2);
  fn("phi.prior.W_mu1", phi.prior.W_mu1);
  fn("phi.prior.W_mu2", phi.prior.W_mu2);
  fn("phi.prior.b_mu", phi.prior.b_mu);
  fn("phi.prior.W_sig1", phi.prior.W_sig1);
  fn("phi.prior.W_sig2", phi.prior.W_sig2);
  fn("phi.prior.b_sig", phi.prior.b_sig);
}

struct ModelParams {
  DimensionsConfig dims;
  GenerativeParams theta;
  ApproximatorParams phi;

  std::vector<ArrayView> trainable_arrays();
  std::vector<ConstArrayView> trainable_arrays() const;
};

// Zero-valued parameters with the shapes implied by dims.
ModelParams allocate_params(const DimensionsConfig& dims);

// Every weight and bias drawn i.i.d. from N(0, 0.01^2); tied matrices are
// drawn once. Same seed, same parameters.
ModelParams init_params(const DimensionsConfig& dims, RngState& rng);

GaussianParams encode_posterior(const ApproximatorParams& phi, const DenseVector& x1,
                                const DenseVector& x2, const DenseVector& y);
GaussianParams encode_prior(const ApproximatorParams& phi, const DenseVector& x1,
                            const DenseVector& x2);

// mu + exp(0.5 * log_var) .* eps
DenseVector reparameterize(const GaussianParams& g, const DenseVector& eps);

struct DecodedArguments {
  DenseVector x1p, x2p;  // per-word Bernoulli means, entries in (0, 1)
};
DecodedArguments decode_arguments(const GenerativeParams& theta, const DenseVector& z);

// Relation distribution over d_y classes: softmax over the MLP-transformed z.
DenseVector decode_relation(const GenerativeParams& theta, const DenseVector& z);

}  // namespace varndrr
