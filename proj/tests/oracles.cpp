#include "oracles.hpp"

#include <cmath>
#include <unordered_set>

namespace varndrr::testing {

std::vector<double> naive_affine(const DenseMatrix& w, const std::vector<double>& v,
                                 const std::vector<double>& b) {
  std::vector<double> out(w.rows);
  for (std::size_t i = 0; i < w.rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < w.cols; ++j) {
      sum += w(i, j) * v[j];
    }
    out[i] = sum + b[i];
  }
  return out;
}

namespace {

std::vector<double> naive_tanh(std::vector<double> v) {
  for (double& x : v) x = std::tanh(x);
  return v;
}

std::vector<double> hidden_layer(const DenseMatrix& w, const DenseVector& x,
                                 const DenseVector& b) {
  return naive_tanh(naive_affine(w, x.data, b.data));
}

// mu-or-logvar line of the approximators: wa*ha + wb*hb (+ wy*hy) + bias
std::vector<double> linear_combination(const DenseMatrix& wa, const std::vector<double>& ha,
                                       const DenseMatrix& wb, const std::vector<double>& hb,
                                       const DenseMatrix* wy, const std::vector<double>* hy,
                                       const DenseVector& bias) {
  std::vector<double> out(bias.data);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < wa.cols; ++j) out[i] += wa(i, j) * ha[j];
    for (std::size_t j = 0; j < wb.cols; ++j) out[i] += wb(i, j) * hb[j];
    if (wy) {
      for (std::size_t j = 0; j < wy->cols; ++j) out[i] += (*wy)(i, j) * (*hy)[j];
    }
  }
  return out;
}

}  // namespace

OracleGaussian oracle_posterior(const PosteriorParams& q, const EncodedInstance& inst) {
  const std::vector<double> h1 = hidden_layer(q.W_h, inst.x1, q.b_h1);
  const std::vector<double> h2 = hidden_layer(q.W_h, inst.x2, q.b_h2);
  const std::vector<double> hy = hidden_layer(q.W_hy, inst.y, q.b_hy);
  OracleGaussian g;
  g.mu = linear_combination(q.W_mu1, h1, q.W_mu2, h2, &q.W_muy, &hy, q.b_mu);
  g.log_var = linear_combination(q.W_sig1, h1, q.W_sig2, h2, &q.W_sigy, &hy, q.b_sig);
  return g;
}

OracleGaussian oracle_prior(const PriorParams& p, const EncodedInstance& inst) {
  const std::vector<double> h1 = hidden_layer(p.W_h1, inst.x1, p.b_h1);
  const std::vector<double> h2 = hidden_layer(p.W_h2, inst.x2, p.b_h2);
  OracleGaussian g;
  g.mu = linear_combination(p.W_mu1, h1, p.W_mu2, h2, nullptr, nullptr, p.b_mu);
  g.log_var = linear_combination(p.W_sig1, h1, p.W_sig2, h2, nullptr, nullptr, p.b_sig);
  return g;
}

std::pair<std::vector<double>, std::vector<double>> oracle_decode_arguments(
    const GenerativeParams& theta, const std::vector<double>& z) {
  const std::vector<double> h1 = naive_tanh(naive_affine(theta.W_h1p, z, theta.b_h1p.data));
  const std::vector<double> h2 = naive_tanh(naive_affine(theta.W_h2p, z, theta.b_h2p.data));
  std::vector<double> x1p = naive_affine(theta.W_xp, h1, theta.b_x1p.data);
  std::vector<double> x2p = naive_affine(theta.W_xp, h2, theta.b_x2p.data);
  for (double& v : x1p) v = 1.0 / (1.0 + std::exp(-v));
  for (double& v : x2p) v = 1.0 / (1.0 + std::exp(-v));
  return {x1p, x2p};
}

std::vector<double> oracle_decode_relation(const GenerativeParams& theta,
                                           const std::vector<double>& z) {
  std::vector<double> h = z;
  for (int k = 0; k < 4; ++k) {
    h = naive_tanh(naive_affine(theta.W_mlp[k], h, theta.b_mlp[k].data));
  }
  std::vector<double> logits = naive_affine(theta.W_yp, h, theta.b_yp.data);
  double peak = logits[0];
  for (double v : logits) peak = std::max(peak, v);
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - peak);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return logits;
}

namespace {

double log_normal_density(double x, double mu, double log_var) {
  constexpr double kLog2Pi = 1.8378770664093454835606594728112;
  const double diff = x - mu;
  return -0.5 * (kLog2Pi + log_var + diff * diff * std::exp(-log_var));
}

}  // namespace

double mc_kl_estimate(const GaussianParams& q, const GaussianParams& p,
                      std::size_t num_samples, RngState& rng) {
  const std::size_t dim = q.mu.dim();
  double sum = 0.0;
  for (std::size_t s = 0; s < num_samples; ++s) {
    const DenseVector eps = sample_standard_gaussian(rng, dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const double z = q.mu.data[i] + std::exp(0.5 * q.log_var.data[i]) * eps.data[i];
      sum += log_normal_density(z, q.mu.data[i], q.log_var.data[i]) -
             log_normal_density(z, p.mu.data[i], p.log_var.data[i]);
    }
  }
  return sum / static_cast<double>(num_samples);
}

GradCheckResult check_gradients(const ModelParams& params, const EncodedInstance& inst,
                                std::uint64_t eps_seed, std::size_t num_samples, double step,
                                double rel_tol, double abs_floor) {
  ModelParams work = params;

  RngState analytic_rng(eps_seed);
  const auto [breakdown, grads] = elbo_and_gradients(work, inst, analytic_rng, num_samples);
  (void)breakdown;

  auto objective_total = [&work, &inst, num_samples, eps_seed]() {
    RngState rng(eps_seed);
    Gradients scratch = Gradients::zeros_like(work);
    return accumulate_elbo_gradients(work, inst, rng, num_samples, scratch).total;
  };

  GradCheckResult result;
  const auto param_views = work.trainable_arrays();
  const auto grad_views = grads.arrays();
  for (std::size_t a = 0; a < param_views.size(); ++a) {
    for (std::size_t i = 0; i < param_views[a].size(); ++i) {
      double& entry = param_views[a].data[i];
      const double saved = entry;
      entry = saved + step;
      const double up = objective_total();
      entry = saved - step;
      const double down = objective_total();
      entry = saved;

      const double numeric = (up - down) / (2.0 * step);
      const double analytic = grad_views[a].data[i];
      const double abs_diff = std::abs(analytic - numeric);
      const double denom = std::max(std::abs(analytic), std::abs(numeric));
      const double rel = denom > 0.0 ? abs_diff / denom : 0.0;

      ++result.entries_checked;
      result.worst_abs_diff = std::max(result.worst_abs_diff, abs_diff);
      const bool ok = abs_diff < abs_floor || rel < rel_tol;
      if (abs_diff >= abs_floor && rel > result.worst_rel_err) {
        result.worst_rel_err = rel;
        result.worst_array = std::string(param_views[a].name);
        result.worst_index = i;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
      if (!ok) result.passed = false;
    }
  }
  return result;
}

bool oracle_predict(const SynthGroundTruth& truth, const RawDocumentPair& pair) {
  const std::unordered_set<std::string> pos(truth.positive_tokens.begin(),
                                            truth.positive_tokens.end());
  const std::unordered_set<std::string> neg(truth.negative_tokens.begin(),
                                            truth.negative_tokens.end());
  std::unordered_set<std::string> seen;
  long score = 0;
  for (const auto* arg : {&pair.arg1_tokens, &pair.arg2_tokens}) {
    for (const std::string& token : *arg) {
      if (!seen.insert(token).second) continue;
      if (pos.count(token)) ++score;
      if (neg.count(token)) --score;
    }
  }
  return score >= 0;
}

DimensionsConfig tiny_dims() {
  DimensionsConfig dims;
  dims.d_z = 3;
  dims.d_x1 = dims.d_x2 = 7;
  dims.d_h1 = dims.d_h2 = dims.d_hy = 5;
  dims.d_h1p = dims.d_h2p = 5;
  dims.d_m = 4;
  dims.d_y = 2;
  return dims;
}

ModelParams random_params(const DimensionsConfig& dims, RngState& rng, double scale) {
  ModelParams p = allocate_params(dims);
  for (ArrayView view : p.trainable_arrays()) {
    rng.fill_gaussian({view.data, view.size()}, 0.0, scale);
  }
  return p;
}

EncodedInstance random_instance(const DimensionsConfig& dims, RngState& rng) {
  EncodedInstance inst;
  inst.x1 = DenseVector(dims.d_x1);
  inst.x2 = DenseVector(dims.d_x2);
  for (double& v : inst.x1.data) v = rng.uniform01() < 0.4 ? 1.0 : 0.0;
  for (double& v : inst.x2.data) v = rng.uniform01() < 0.4 ? 1.0 : 0.0;
  inst.y = rng.uniform01() < 0.5 ? DenseVector{1.0, 0.0} : DenseVector{0.0, 1.0};
  return inst;
}

}  // namespace varndrr::testing
