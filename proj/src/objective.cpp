#include "varndrr/objective.hpp"

#include <cmath>
#include <string>

namespace varndrr {

Gradients Gradients::zeros_like(const ModelParams& params) {
  ModelParams zeroed = allocate_params(params.dims);
  Gradients g;
  g.theta = std::move(zeroed.theta);
  g.phi = std::move(zeroed.phi);
  return g;
}

std::vector<ArrayView> Gradients::arrays() {
  std::vector<ArrayView> out;
  auto add = [&out](std::string_view name, auto& a) {
    using T = std::remove_reference_t<decltype(a)>;
    if constexpr (std::is_same_v<T, DenseMatrix>) {
      out.push_back({name, a.data.data(), a.rows, a.cols});
    } else {
      out.push_back({name, a.data.data(), a.dim(), 1});
    }
  };
  visit_parameter_arrays(theta, phi, add);
  return out;
}

std::vector<ConstArrayView> Gradients::arrays() const {
  std::vector<ConstArrayView> out;
  auto add = [&out](std::string_view name, const auto& a) {
    using T = std::remove_cvref_t<decltype(a)>;
    if constexpr (std::is_same_v<T, DenseMatrix>) {
      out.push_back({name, a.data.data(), a.rows, a.cols});
    } else {
      out.push_back({name, a.data.data(), a.dim(), 1});
    }
  };
  visit_parameter_arrays(theta, phi, add);
  return out;
}

void Gradients::set_zero() {
  for (ArrayView view : arrays()) std::fill(view.data, view.data + view.size(), 0.0);
}

void Gradients::scale(double s) {
  for (ArrayView view : arrays()) {
    for (std::size_t i = 0; i < view.size(); ++i) view.data[i] *= s;
  }
}

double kl_diag_gaussians(const GaussianParams& q, const GaussianParams& p) {
  const std::size_t dim = q.mu.dim();
  if (q.log_var.dim() != dim || p.mu.dim() != dim || p.log_var.dim() != dim) {
    throw ShapeError("kl_diag_gaussians: dims q(" + std::to_string(dim) + "," +
                     std::to_string(q.log_var.dim()) + ") vs p(" + std::to_string(p.mu.dim()) +
                     "," + std::to_string(p.log_var.dim()) + ")");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double diff = q.mu.data[i] - p.mu.data[i];
    const double lv_q = q.log_var.data[i];
    const double lv_p = p.log_var.data[i];
    kl += 0.5 * ((lv_p - lv_q) + (std::exp(lv_q) + diff * diff) * std::exp(-lv_p) - 1.0);
  }
  return kl;
}

namespace {

double clamp_prob(double p) {
  if (p < kProbFloor) return kProbFloor;
  if (p > 1.0 - kProbFloor) return 1.0 - kProbFloor;
  return p;
}

bool clamped(double p) { return p < kProbFloor || p > 1.0 - kProbFloor; }

double bernoulli_sum(const DenseVector& x, const DenseVector& xp) {
  if (x.dim() != xp.dim()) {
    throw ShapeError("log_px_given_z: x dim " + std::to_string(x.dim()) + " vs prediction dim " +
                     std::to_string(xp.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const double p = clamp_prob(xp.data[i]);
    sum += x.data[i] * std::log(p) + (1.0 - x.data[i]) * std::log(1.0 - p);
  }
  return sum;
}

void check_finite(const DenseVector& v, const char* name) {
  for (double x : v.data) {
    if (!std::isfinite(x)) {
      throw NumericalError(std::string("non-finite values in ") + name);
    }
  }
}

}  // namespace

double log_px_given_z(const DenseVector& x1, const DenseVector& x2, const DenseVector& x1p,
                      const DenseVector& x2p) {
  return bernoulli_sum(x1, x1p) + bernoulli_sum(x2, x2p);
}

double log_py_given_z(const DenseVector& y, const DenseVector& yp) {
  if (y.dim() != yp.dim()) {
    throw ShapeError("log_py_given_z: y dim " + std::to_string(y.dim()) + " vs prediction dim " +
                     std::to_string(yp.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < y.dim(); ++i) {
    if (y.data[i] != 0.0) sum += y.data[i] * std::log(clamp_prob(yp.data[i]));
  }
  return sum;
}

namespace {

// tanh backward: d_pre = d_post .* (1 - h^2)
DenseVector tanh_backward(const DenseVector& d_post, const DenseVector& h) {
  DenseVector d_pre(d_post.dim());
  for (std::size_t i = 0; i < d_post.dim(); ++i) {
    d_pre.data[i] = d_post.data[i] * (1.0 - h.data[i] * h.data[i]);
  }
  return d_pre;
}

// Gradient of the Bernoulli log-likelihood w.r.t. the sigmoid pre-activation:
// x - p, zero where the probability sits in the clamped band.
DenseVector bernoulli_logit_grad(const DenseVector& x, const DenseVector& p) {
  DenseVector d(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    d.data[i] = clamped(p.data[i]) ? 0.0 : x.data[i] - p.data[i];
  }
  return d;
}

struct PosteriorTrace {
  DenseVector h1, h2, hy;
  GaussianParams g;
};

struct PriorTrace {
  DenseVector h1, h2;
  GaussianParams g;
};

PosteriorTrace run_posterior(const PosteriorParams& q, const EncodedInstance& inst) {
  PosteriorTrace t;
  t.h1 = tanh_vec(affine(q.W_h, inst.x1, q.b_h1));
  t.h2 = tanh_vec(affine(q.W_h, inst.x2, q.b_h2));
  t.hy = tanh_vec(affine(q.W_hy, inst.y, q.b_hy));
  t.g.mu = affine(q.W_mu1, t.h1, q.b_mu);
  add_scaled(t.g.mu, affine(q.W_mu2, t.h2, DenseVector(q.W_mu2.rows)));
  add_scaled(t.g.mu, affine(q.W_muy, t.hy, DenseVector(q.W_muy.rows)));
  t.g.log_var = affine(q.W_sig1, t.h1, q.b_sig);
  add_scaled(t.g.log_var, affine(q.W_sig2, t.h2, DenseVector(q.W_sig2.rows)));
  add_scaled(t.g.log_var, affine(q.W_sigy, t.hy, DenseVector(q.W_sigy.rows)));
  return t;
}

PriorTrace run_prior(const PriorParams& p, const EncodedInstance& inst) {
  PriorTrace t;
  t.h1 = tanh_vec(affine(p.W_h1, inst.x1, p.b_h1));
  t.h2 = tanh_vec(affine(p.W_h2, inst.x2, p.b_h2));
  t.g.mu = affine(p.W_mu1, t.h1, p.b_mu);
  add_scaled(t.g.mu, affine(p.W_mu2, t.h2, DenseVector(p.W_mu2.rows)));
  t.g.log_var = affine(p.W_sig1, t.h1, p.b_sig);
  add_scaled(t.g.log_var, affine(p.W_sig2, t.h2, DenseVector(p.W_sig2.rows)));
  return t;
}

}  // namespace

ElboBreakdown accumulate_elbo_gradients(const ModelParams& params, const EncodedInstance& inst,
                                        RngState& rng, std::size_t num_samples,
                                        Gradients& grads) {
  if (num_samples == 0) {
    throw std::invalid_argument("accumulate_elbo_gradients: num_samples must be >= 1");
  }
  const auto& theta = params.theta;
  const auto& post = params.phi.posterior;
  const auto& prior = params.phi.prior;
  auto& g_theta = grads.theta;
  auto& g_post = grads.phi.posterior;
  auto& g_prior = grads.phi.prior;

  // ---- forward: both approximators ----
  const PosteriorTrace q = run_posterior(post, inst);
  const PriorTrace p = run_prior(prior, inst);
  check_finite(q.g.mu, "posterior mu");
  check_finite(q.g.log_var, "posterior log_var");
  check_finite(p.g.mu, "prior mu");
  check_finite(p.g.log_var, "prior log_var");

  const std::size_t d_z = q.g.mu.dim();
  DenseVector sigma_q(d_z);
  for (std::size_t i = 0; i < d_z; ++i) sigma_q.data[i] = std::exp(0.5 * q.g.log_var.data[i]);

  const double kl = kl_diag_gaussians(q.g, p.g);
  if (!std::isfinite(kl)) throw NumericalError("non-finite values in kl term");

  // Upstream derivative of the ascent objective w.r.t. the Gaussian
  // parameters. The -KL part is analytic; the sampled part joins below.
  DenseVector d_mu_q(d_z), d_lv_q(d_z), d_mu_p(d_z), d_lv_p(d_z);
  for (std::size_t i = 0; i < d_z; ++i) {
    const double diff = q.g.mu.data[i] - p.g.mu.data[i];
    const double inv_var_p = std::exp(-p.g.log_var.data[i]);
    const double var_q = std::exp(q.g.log_var.data[i]);
    d_mu_q.data[i] = -diff * inv_var_p;
    d_lv_q.data[i] = -0.5 * (var_q * inv_var_p - 1.0);
    d_mu_p.data[i] = diff * inv_var_p;
    d_lv_p.data[i] = -0.5 * (1.0 - (var_q + diff * diff) * inv_var_p);
  }

  // ---- sampled reconstruction terms ----
  const double sample_weight = 1.0 / static_cast<double>(num_samples);
  double recon_x = 0.0;
  double recon_y = 0.0;
  for (std::size_t l = 0; l < num_samples; ++l) {
    const DenseVector eps = sample_standard_gaussian(rng, d_z);
    DenseVector z(d_z);
    for (std::size_t i = 0; i < d_z; ++i) {
      z.data[i] = q.g.mu.data[i] + sigma_q.data[i] * eps.data[i];
    }

    // decoder forward
    const DenseVector hd1 = tanh_vec(affine(theta.W_h1p, z, theta.b_h1p));
    const DenseVector hd2 = tanh_vec(affine(theta.W_h2p, z, theta.b_h2p));
    const DenseVector x1p = sigmoid_vec(affine(theta.W_xp, hd1, theta.b_x1p));
    const DenseVector x2p = sigmoid_vec(affine(theta.W_xp, hd2, theta.b_x2p));
    std::array<DenseVector, 5> m;  // MLP activations, m[0] = z
    m[0] = z;
    for (int k = 0; k < 4; ++k) {
      m[k + 1] = tanh_vec(affine(theta.W_mlp[k], m[k], theta.b_mlp[k]));
    }
    const DenseVector yp = softmax_vec(affine(theta.W_yp, m[4], theta.b_yp));
    check_finite(x1p, "decoded x1");
    check_finite(x2p, "decoded x2");
    check_finite(yp, "decoded relation");

    recon_x += sample_weight * log_px_given_z(inst.x1, inst.x2, x1p, x2p);
    recon_y += sample_weight * log_py_given_z(inst.y, yp);

    // decoder backward; every path ends in d_z_total
    DenseVector d_z_total(d_z);

    // relation head: d/d(logits) of sum_i y_i log yp_i is y - yp
    DenseVector d_oy(yp.dim());
    for (std::size_t i = 0; i < yp.dim(); ++i) {
      d_oy.data[i] = sample_weight * (inst.y.data[i] - yp.data[i]);
      if (inst.y.data[i] != 0.0 && clamped(yp.data[i])) {
        // hot entry saturated: the clamped log is locally constant
        for (std::size_t j = 0; j < yp.dim(); ++j) d_oy.data[j] = 0.0;
        break;
      }
    }
    add_outer(g_theta.W_yp, d_oy, m[4]);
    add_scaled(g_theta.b_yp, d_oy);
    DenseVector d_m = matvec_transposed(theta.W_yp, d_oy);
    for (int k = 3; k >= 0; --k) {
      const DenseVector d_pre = tanh_backward(d_m, m[k + 1]);
      add_outer(g_theta.W_mlp[k], d_pre, m[k]);
      add_scaled(g_theta.b_mlp[k], d_pre);
      d_m = matvec_transposed(theta.W_mlp[k], d_pre);
    }
    add_scaled(d_z_total, d_m);

    // argument heads
    DenseVector d_o1 = bernoulli_logit_grad(inst.x1, x1p);
    DenseVector d_o2 = bernoulli_logit_grad(inst.x2, x2p);
    for (double& v : d_o1.data) v *= sample_weight;
    for (double& v : d_o2.data) v *= sample_weight;
    add_outer(g_theta.W_xp, d_o1, hd1);  // tied accumulator takes both heads
    add_outer(g_theta.W_xp, d_o2, hd2);
    add_scaled(g_theta.b_x1p, d_o1);
    add_scaled(g_theta.b_x2p, d_o2);
    const DenseVector d_g1 = tanh_backward(matvec_transposed(theta.W_xp, d_o1), hd1);
    const DenseVector d_g2 = tanh_backward(matvec_transposed(theta.W_xp, d_o2), hd2);
    add_outer(g_theta.W_h1p, d_g1, z);
    add_outer(g_theta.W_h2p, d_g2, z);
    add_scaled(g_theta.b_h1p, d_g1);
    add_scaled(g_theta.b_h2p, d_g2);
    add_scaled(d_z_total, matvec_transposed(theta.W_h1p, d_g1));
    add_scaled(d_z_total, matvec_transposed(theta.W_h2p, d_g2));

    // through the reparameterization into the posterior Gaussian
    for (std::size_t i = 0; i < d_z; ++i) {
      d_mu_q.data[i] += d_z_total.data[i];
      d_lv_q.data[i] += d_z_total.data[i] * 0.5 * sigma_q.data[i] * eps.data[i];
    }
  }

  // ---- posterior encoder backward ----
  add_outer(g_post.W_mu1, d_mu_q, q.h1);
  add_outer(g_post.W_mu2, d_mu_q, q.h2);
  add_outer(g_post.W_muy, d_mu_q, q.hy);
  add_scaled(g_post.b_mu, d_mu_q);
  add_outer(g_post.W_sig1, d_lv_q, q.h1);
  add_outer(g_post.W_sig2, d_lv_q, q.h2);
  add_outer(g_post.W_sigy, d_lv_q, q.hy);
  add_scaled(g_post.b_sig, d_lv_q);

  DenseVector d_h1 = matvec_transposed(post.W_mu1, d_mu_q);
  add_scaled(d_h1, matvec_transposed(post.W_sig1, d_lv_q));
  DenseVector d_h2 = matvec_transposed(post.W_mu2, d_mu_q);
  add_scaled(d_h2, matvec_transposed(post.W_sig2, d_lv_q));
  DenseVector d_hy = matvec_transposed(post.W_muy, d_mu_q);
  add_scaled(d_hy, matvec_transposed(post.W_sigy, d_lv_q));

  const DenseVector d_a1 = tanh_backward(d_h1, q.h1);
  const DenseVector d_a2 = tanh_backward(d_h2, q.h2);
  const DenseVector d_ay = tanh_backward(d_hy, q.hy);
  add_outer(g_post.W_h, d_a1, inst.x1);  // tied accumulator takes both arguments
  add_outer(g_post.W_h, d_a2, inst.x2);
  add_scaled(g_post.b_h1, d_a1);
  add_scaled(g_post.b_h2, d_a2);
  add_outer(g_post.W_hy, d_ay, inst.y);
  add_scaled(g_post.b_hy, d_ay);

  // ---- prior encoder backward (reached only by the KL term) ----
  add_outer(g_prior.W_mu1, d_mu_p, p.h1);
  add_outer(g_prior.W_mu2, d_mu_p, p.h2);
  add_scaled(g_prior.b_mu, d_mu_p);
  add_outer(g_prior.W_sig1, d_lv_p, p.h1);
  add_outer(g_prior.W_sig2, d_lv_p, p.h2);
  add_scaled(g_prior.b_sig, d_lv_p);

  DenseVector d_ph1 = matvec_transposed(prior.W_mu1, d_mu_p);
  add_scaled(d_ph1, matvec_transposed(prior.W_sig1, d_lv_p));
  DenseVector d_ph2 = matvec_transposed(prior.W_mu2, d_mu_p);
  add_scaled(d_ph2, matvec_transposed(prior.W_sig2, d_lv_p));

  const DenseVector d_pa1 = tanh_backward(d_ph1, p.h1);
  const DenseVector d_pa2 = tanh_backward(d_ph2, p.h2);
  add_outer(g_prior.W_h1, d_pa1, inst.x1);
  add_outer(g_prior.W_h2, d_pa2, inst.x2);
  add_scaled(g_prior.b_h1, d_pa1);
  add_scaled(g_prior.b_h2, d_pa2);

  ElboBreakdown breakdown;
  breakdown.kl_term = kl;
  breakdown.recon_x_term = recon_x;
  breakdown.recon_y_term = recon_y;
  breakdown.total = -kl + recon_x + recon_y;
  if (!std::isfinite(breakdown.total)) {
    throw NumericalError("non-finite values in objective total");
  }
  return breakdown;
}

std::pair<ElboBreakdown, Gradients> elbo_and_gradients(const ModelParams& params,
                                                       const EncodedInstance& inst,
                                                       RngState& rng,
                                                       std::size_t num_samples) {
  Gradients grads = Gradients::zeros_like(params);
  ElboBreakdown breakdown = accumulate_elbo_gradients(params, inst, rng, num_samples, grads);
  return {breakdown, std::move(grads)};
}

}  // namespace varndrr
