#pragma once

// Independent reference computations used by the test suites. Everything
// here is written as plain loops straight from the model equations, so the
// production code paths in src/ are checked against a second, separately
// written route.

#include <string>
#include <vector>

#include "varndrr/data.hpp"
#include "varndrr/model.hpp"
#include "varndrr/objective.hpp"

namespace varndrr::testing {

// Naive dense product w*v + b, nested loops only.
std::vector<double> naive_affine(const DenseMatrix& w, const std::vector<double>& v,
                                 const std::vector<double>& b);

struct OracleGaussian {
  std::vector<double> mu, log_var;
};

// Straight-line evaluations of the posterior/prior encoders and the two
// decoder heads.
OracleGaussian oracle_posterior(const PosteriorParams& q, const EncodedInstance& inst);
OracleGaussian oracle_prior(const PriorParams& p, const EncodedInstance& inst);
std::pair<std::vector<double>, std::vector<double>> oracle_decode_arguments(
    const GenerativeParams& theta, const std::vector<double>& z);
std::vector<double> oracle_decode_relation(const GenerativeParams& theta,
                                           const std::vector<double>& z);

// Monte Carlo estimate of KL(q || p) as the sample mean of
// log q(z) - log p(z) under z ~ q.
double mc_kl_estimate(const GaussianParams& q, const GaussianParams& p,
                      std::size_t num_samples, RngState& rng);

// Central finite differences against the implementation's own objective,
// with the noise stream pinned via eps_seed.
struct GradCheckResult {
  bool passed = true;
  std::size_t entries_checked = 0;
  double worst_abs_diff = 0.0;
  double worst_rel_err = 0.0;   // among entries above the absolute floor
  std::string worst_array;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0, worst_numeric = 0.0;
};

GradCheckResult check_gradients(const ModelParams& params, const EncodedInstance& inst,
                                std::uint64_t eps_seed, std::size_t num_samples,
                                double step = 1e-5, double rel_tol = 1e-4,
                                double abs_floor = 1e-8);

// Presence-threshold classifier over a synthetic corpus' ground truth:
// positive iff at least as many distinct target-exclusive tokens appear as
// other-exclusive ones.
bool oracle_predict(const SynthGroundTruth& truth, const RawDocumentPair& pair);

// Small-model helpers for randomized checks.
DimensionsConfig tiny_dims();
ModelParams random_params(const DimensionsConfig& dims, RngState& rng, double scale);
EncodedInstance random_instance(const DimensionsConfig& dims, RngState& rng);

}  // namespace varndrr::testing
