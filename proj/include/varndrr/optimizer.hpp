#pragma once

#include "varndrr/model.hpp"
#include "varndrr/objective.hpp"

namespace varndrr {

// Adam moments over the flat parameter enumeration. Tied arrays appear
// once, so each shared matrix is stepped exactly once per update.
struct AdamState {
  std::size_t step = 0;  // t
  double alpha = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  std::vector<std::vector<double>> m, v;  // one pair per array, enumeration order

  static AdamState init_like(const ModelParams& params, double alpha = 0.001,
                             double beta1 = 0.9, double beta2 = 0.999,
                             double eps_hat = 1e-8);
};

// One bias-corrected Adam step in the ASCENT direction of the objective:
// params += alpha * m_hat / (sqrt(v_hat) + eps_hat). Throws NumericalError
// on a non-finite gradient entry.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state);

}  // namespace varndrr
