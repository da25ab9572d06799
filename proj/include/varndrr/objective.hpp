#pragma once

#include <utility>

#include "varndrr/data.hpp"
#include "varndrr/model.hpp"

namespace varndrr {

// A non-finite value showed up where the math guarantees a finite one.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bernoulli/softmax probabilities are clamped to [kProbFloor, 1 - kProbFloor]
// before any log; saturated entries contribute zero gradient.
inline constexpr double kProbFloor = 1e-10;

// Per-array gradients of the variational bound, shape-congruent with
// ModelParams. Tied matrices get a single accumulator.
struct Gradients {
  GenerativeParams theta;
  ApproximatorParams phi;

  static Gradients zeros_like(const ModelParams& params);

  // Same enumeration order as ModelParams::trainable_arrays().
  std::vector<ArrayView> arrays();
  std::vector<ConstArrayView> arrays() const;

  void set_zero();
  void scale(double s);
};

// The evaluated bound for one instance. total = -kl_term + recon_x_term +
// recon_y_term; the recon terms are Monte Carlo averages over the drawn
// samples, the KL term is analytic.
struct ElboBreakdown {
  double kl_term = 0.0;
  double recon_x_term = 0.0;
  double recon_y_term = 0.0;
  double total = 0.0;
};

// KL( N(mu_q, sig_q^2) || N(mu_p, sig_p^2) ) for diagonal Gaussians,
// summed over coordinates. Non-negative; zero iff q == p.
double kl_diag_gaussians(const GaussianParams& q, const GaussianParams& p);

// Sum over both arguments of the Bernoulli log-likelihoods
// x*log(x') + (1-x)*log(1-x'), with the clamped probabilities. Always <= 0.
double log_px_given_z(const DenseVector& x1, const DenseVector& x2,
                      const DenseVector& x1p, const DenseVector& x2p);

// sum_i y_i * log(y'_i), clamped. Always <= 0.
double log_py_given_z(const DenseVector& y, const DenseVector& yp);

// Evaluates the reparameterized bound for one instance with num_samples
// fresh noise draws from rng, and ADDS its exact ascent gradients (the
// direction that increases the bound) into grads. The analytic KL term
// feeds gradients to the posterior and the prior encoder; the sampled
// reconstruction terms feed the posterior encoder and every generative
// array.
ElboBreakdown accumulate_elbo_gradients(const ModelParams& params, const EncodedInstance& inst,
                                        RngState& rng, std::size_t num_samples,
                                        Gradients& grads);

std::pair<ElboBreakdown, Gradients> elbo_and_gradients(const ModelParams& params,
                                                       const EncodedInstance& inst,
                                                       RngState& rng,
                                                       std::size_t num_samples);

}  // namespace varndrr
