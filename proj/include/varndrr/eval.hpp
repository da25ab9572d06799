#pragma once

#include <string>
#include <vector>

#include "varndrr/data.hpp"
#include "varndrr/model.hpp"

namespace varndrr {

// Binary classification counts and the derived rates. Rates are fractions
// in [0, 1]; a zero denominator yields 0.
struct MetricsReport {
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// Test-time prediction goes through the prior approximator with z fixed to
// its mean (no sampling), then the relation decoder. An exact tie between
// the two class probabilities counts as positive.
bool predict(const ModelParams& model, const EncodedInstance& inst);

// Probability the relation decoder assigns to the positive class under the
// same deterministic z = prior mean.
double positive_probability(const ModelParams& model, const EncodedInstance& inst);

MetricsReport compute_metrics(const std::vector<bool>& predictions,
                              const std::vector<bool>& golds);

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                  std::size_t tn);

// Published full-scale PDTB results for this model, kept for comparison in
// eval output. Percentages, two decimals.
struct ReferenceScore {
  Relation task;
  double accuracy, precision, recall, f1;
};

// Parses the bundled reference table; one row per relation task.
const std::vector<ReferenceScore>& reference_scores();

// Table-style rendering, percentages with two decimals, with the matching
// reference row beneath when available.
std::string format_metrics_table(const MetricsReport& report, Relation task,
                                 std::string_view split_name);

// Header line plus one data row; fractions, not percentages.
std::string metrics_to_csv(const MetricsReport& report);

}  // namespace varndrr
