#pragma once

#include <filesystem>
#include <string>

#include "varndrr/data.hpp"
#include "varndrr/eval.hpp"
#include "varndrr/model.hpp"
#include "varndrr/optimizer.hpp"

namespace varndrr {

struct TrainConfig {
  std::size_t batch_size = 16;   // M
  std::size_t max_epochs = 1000; // A
  std::size_t mc_samples = 1;    // L
  DimensionsConfig dims;
  double alpha = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  std::uint64_t seed = 1;
  Relation task = Relation::EXP;
  // Stop after this many consecutive epochs without a dev-F1 improvement.
  std::size_t patience = 100;

  void validate() const;  // throws ShapeError / std::invalid_argument
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double elbo_per_datapoint = 0.0;
  double dev_accuracy = 0.0, dev_precision = 0.0, dev_recall = 0.0, dev_f1 = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> records;
  std::size_t best_index = 0;  // earliest epoch with the highest dev F1
};

struct TrainResult {
  ModelParams params;  // snapshot from the best dev-F1 epoch
  TrainHistory history;
  Vocabulary vocab;
  AdamState adam;      // optimizer state at the end of training
};

// Salts for the independent random streams inside train(). The stream for
// epoch e uses kEpochStreamBase + e, so minibatch order and noise depend
// on (seed, epoch) only.
inline constexpr std::uint64_t kInitStreamSalt = 1;
inline constexpr std::uint64_t kBalanceStreamSalt = 2;
inline constexpr std::uint64_t kEpochStreamBase = 0x10000;

// Runs the full pipeline on raw records: vocabulary from the train split,
// vectorization against the chosen task, one balancing pass, then
// minibatch Adam ascent on the variational bound with per-epoch dev
// evaluation. Returns the parameters of the epoch with the best dev F1.
TrainResult train(const TrainConfig& config, const DatasetSplit& data, RngState& rng);

// True when dev F1 has gone `patience` consecutive epochs without
// improving on the best value seen so far.
bool convergence_check(const TrainHistory& history, std::size_t patience);

MetricsReport evaluate(const ModelParams& params, const std::vector<EncodedInstance>& split);

// CSV with header epoch,elbo_per_datapoint,dev_acc,dev_p,dev_r,dev_f1.
// Numbers are shortest-round-trip formatted, so equal histories give
// byte-identical files.
std::string history_to_csv(const TrainHistory& history);
void write_history_csv(const TrainHistory& history, const std::filesystem::path& path);

}  // namespace varndrr
