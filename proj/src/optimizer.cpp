#include "varndrr/optimizer.hpp"

#include <cmath>
#include <string>

namespace varndrr {

AdamState AdamState::init_like(const ModelParams& params, double alpha, double beta1,
                               double beta2, double eps_hat) {
  AdamState state;
  state.alpha = alpha;
  state.beta1 = beta1;
  state.beta2 = beta2;
  state.eps_hat = eps_hat;
  for (ConstArrayView view : params.trainable_arrays()) {
    state.m.emplace_back(view.size(), 0.0);
    state.v.emplace_back(view.size(), 0.0);
  }
  return state;
}

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state) {
  const std::vector<ArrayView> param_views = params.trainable_arrays();
  const std::vector<ConstArrayView> grad_views = grads.arrays();
  if (param_views.size() != grad_views.size() || state.m.size() != param_views.size() ||
      state.v.size() != param_views.size()) {
    throw ShapeError("adam_step: array counts disagree");
  }

  state.step += 1;
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  for (std::size_t a = 0; a < param_views.size(); ++a) {
    ArrayView p = param_views[a];
    ConstArrayView g = grad_views[a];
    if (p.size() != g.size() || state.m[a].size() != p.size()) {
      throw ShapeError("adam_step: shape mismatch for " + std::string(p.name));
    }
    double* m = state.m[a].data();
    double* v = state.v[a].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double grad = g.data[i];
      if (!std::isfinite(grad)) {
        throw NumericalError("adam_step: non-finite gradient in " + std::string(g.name));
      }
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * grad;
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * grad * grad;
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p.data[i] += state.alpha * m_hat / (std::sqrt(v_hat) + state.eps_hat);
    }
  }
}

}  // namespace varndrr
