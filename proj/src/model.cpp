#include "varndrr/model.hpp"

#include <cmath>
#include <string>

namespace varndrr {

void DimensionsConfig::validate() const {
  auto check = [](std::size_t v, const char* name) {
    if (v == 0) throw ShapeError(std::string("DimensionsConfig: ") + name + " must be >= 1");
  };
  check(d_z, "d_z");
  check(d_x1, "d_x1");
  check(d_x2, "d_x2");
  check(d_h1, "d_h1");
  check(d_h2, "d_h2");
  check(d_hy, "d_hy");
  check(d_h1p, "d_h1p");
  check(d_h2p, "d_h2p");
  check(d_m, "d_m");
  if (d_y != 2) throw ShapeError("DimensionsConfig: d_y must be 2 for one-vs-all tasks");
  if (d_x1 != d_x2)
    throw ShapeError("DimensionsConfig: tied transforms require d_x1 == d_x2 (got " +
                     std::to_string(d_x1) + " vs " + std::to_string(d_x2) + ")");
  if (d_h1 != d_h2)
    throw ShapeError("DimensionsConfig: tied encoder hidden requires d_h1 == d_h2");
  if (d_h1p != d_h2p)
    throw ShapeError("DimensionsConfig: tied argument output requires d_h1p == d_h2p");
}

std::vector<ArrayView> ModelParams::trainable_arrays() {
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

std::vector<ConstArrayView> ModelParams::trainable_arrays() const {
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

ModelParams allocate_params(const DimensionsConfig& dims) {
  dims.validate();
  ModelParams p;
  p.dims = dims;

  p.theta.W_h1p = DenseMatrix(dims.d_h1p, dims.d_z);
  p.theta.b_h1p = DenseVector(dims.d_h1p);
  p.theta.W_h2p = DenseMatrix(dims.d_h2p, dims.d_z);
  p.theta.b_h2p = DenseVector(dims.d_h2p);
  p.theta.W_xp = DenseMatrix(dims.d_x1, dims.d_h1p);
  p.theta.b_x1p = DenseVector(dims.d_x1);
  p.theta.b_x2p = DenseVector(dims.d_x2);
  p.theta.W_mlp[0] = DenseMatrix(dims.d_m, dims.d_z);
  p.theta.b_mlp[0] = DenseVector(dims.d_m);
  for (int k = 1; k < 4; ++k) {
    p.theta.W_mlp[k] = DenseMatrix(dims.d_m, dims.d_m);
    p.theta.b_mlp[k] = DenseVector(dims.d_m);
  }
  p.theta.W_yp = DenseMatrix(dims.d_y, dims.d_m);
  p.theta.b_yp = DenseVector(dims.d_y);

  auto& post = p.phi.posterior;
  post.W_h = DenseMatrix(dims.d_h1, dims.d_x1);
  post.b_h1 = DenseVector(dims.d_h1);
  post.b_h2 = DenseVector(dims.d_h2);
  post.W_hy = DenseMatrix(dims.d_hy, dims.d_y);
  post.b_hy = DenseVector(dims.d_hy);
  post.W_mu1 = DenseMatrix(dims.d_z, dims.d_h1);
  post.W_mu2 = DenseMatrix(dims.d_z, dims.d_h2);
  post.W_muy = DenseMatrix(dims.d_z, dims.d_hy);
  post.b_mu = DenseVector(dims.d_z);
  post.W_sig1 = DenseMatrix(dims.d_z, dims.d_h1);
  post.W_sig2 = DenseMatrix(dims.d_z, dims.d_h2);
  post.W_sigy = DenseMatrix(dims.d_z, dims.d_hy);
  post.b_sig = DenseVector(dims.d_z);

  auto& prior = p.phi.prior;
  prior.W_h1 = DenseMatrix(dims.d_h1, dims.d_x1);
  prior.b_h1 = DenseVector(dims.d_h1);
  prior.W_h2 = DenseMatrix(dims.d_h2, dims.d_x2);
  prior.b_h2 = DenseVector(dims.d_h2);
  prior.W_mu1 = DenseMatrix(dims.d_z, dims.d_h1);
  prior.W_mu2 = DenseMatrix(dims.d_z, dims.d_h2);
  prior.b_mu = DenseVector(dims.d_z);
  prior.W_sig1 = DenseMatrix(dims.d_z, dims.d_h1);
  prior.W_sig2 = DenseMatrix(dims.d_z, dims.d_h2);
  prior.b_sig = DenseVector(dims.d_z);

  return p;
}

ModelParams init_params(const DimensionsConfig& dims, RngState& rng) {
  ModelParams p = allocate_params(dims);
  for (ArrayView view : p.trainable_arrays()) {
    rng.fill_gaussian({view.data, view.size()}, 0.0, 0.01);
  }
  return p;
}

GaussianParams encode_posterior(const ApproximatorParams& phi, const DenseVector& x1,
                                const DenseVector& x2, const DenseVector& y) {
  const auto& q = phi.posterior;
  const DenseVector h1 = tanh_vec(affine(q.W_h, x1, q.b_h1));
  const DenseVector h2 = tanh_vec(affine(q.W_h, x2, q.b_h2));
  const DenseVector hy = tanh_vec(affine(q.W_hy, y, q.b_hy));

  DenseVector mu = affine(q.W_mu1, h1, q.b_mu);
  add_scaled(mu, affine(q.W_mu2, h2, DenseVector(q.W_mu2.rows)));
  add_scaled(mu, affine(q.W_muy, hy, DenseVector(q.W_muy.rows)));

  DenseVector log_var = affine(q.W_sig1, h1, q.b_sig);
  add_scaled(log_var, affine(q.W_sig2, h2, DenseVector(q.W_sig2.rows)));
  add_scaled(log_var, affine(q.W_sigy, hy, DenseVector(q.W_sigy.rows)));

  return {std::move(mu), std::move(log_var)};
}

GaussianParams encode_prior(const ApproximatorParams& phi, const DenseVector& x1,
                            const DenseVector& x2) {
  const auto& p = phi.prior;
  const DenseVector h1 = tanh_vec(affine(p.W_h1, x1, p.b_h1));
  const DenseVector h2 = tanh_vec(affine(p.W_h2, x2, p.b_h2));

  DenseVector mu = affine(p.W_mu1, h1, p.b_mu);
  add_scaled(mu, affine(p.W_mu2, h2, DenseVector(p.W_mu2.rows)));

  DenseVector log_var = affine(p.W_sig1, h1, p.b_sig);
  add_scaled(log_var, affine(p.W_sig2, h2, DenseVector(p.W_sig2.rows)));

  return {std::move(mu), std::move(log_var)};
}

DenseVector reparameterize(const GaussianParams& g, const DenseVector& eps) {
  if (eps.dim() != g.mu.dim() || g.log_var.dim() != g.mu.dim()) {
    throw ShapeError("reparameterize: mu/log_var/eps dims " + std::to_string(g.mu.dim()) +
                     "/" + std::to_string(g.log_var.dim()) + "/" + std::to_string(eps.dim()));
  }
  DenseVector z(g.mu.dim());
  for (std::size_t i = 0; i < z.dim(); ++i) {
    z.data[i] = g.mu.data[i] + std::exp(0.5 * g.log_var.data[i]) * eps.data[i];
  }
  return z;
}

DecodedArguments decode_arguments(const GenerativeParams& theta, const DenseVector& z) {
  const DenseVector h1p = tanh_vec(affine(theta.W_h1p, z, theta.b_h1p));
  const DenseVector h2p = tanh_vec(affine(theta.W_h2p, z, theta.b_h2p));
  return {sigmoid_vec(affine(theta.W_xp, h1p, theta.b_x1p)),
          sigmoid_vec(affine(theta.W_xp, h2p, theta.b_x2p))};
}

DenseVector decode_relation(const GenerativeParams& theta, const DenseVector& z) {
  DenseVector h = z;
  for (int k = 0; k < 4; ++k) {
    h = tanh_vec(affine(theta.W_mlp[k], h, theta.b_mlp[k]));
  }
  return softmax_vec(affine(theta.W_yp, h, theta.b_yp));
}

}  // namespace varndrr
