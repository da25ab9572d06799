#include "varndrr/trainer.hpp"

#include <charconv>
#include <fstream>
#include <numeric>

namespace varndrr {

void TrainConfig::validate() const {
  if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (max_epochs == 0) throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
  if (mc_samples == 0) throw std::invalid_argument("TrainConfig: mc_samples must be >= 1");
  dims.validate();
}

bool convergence_check(const TrainHistory& history, std::size_t patience) {
  if (history.records.empty()) {
    throw std::invalid_argument("convergence_check: empty history");
  }
  return history.records.size() - 1 - history.best_index >= patience;
}

MetricsReport evaluate(const ModelParams& params, const std::vector<EncodedInstance>& split) {
  std::vector<bool> predictions, golds;
  predictions.reserve(split.size());
  golds.reserve(split.size());
  for (const EncodedInstance& inst : split) {
    predictions.push_back(predict(params, inst));
    golds.push_back(inst.positive());
  }
  return compute_metrics(predictions, golds);
}

TrainResult train(const TrainConfig& config, const DatasetSplit& data, RngState& rng) {
  config.validate();
  if (data.train.empty()) throw DataError("train: training split is empty");

  const Vocabulary vocab = build_vocab(data.train, config.dims.d_x1);

  std::vector<EncodedInstance> train_set;
  train_set.reserve(data.train.size());
  for (const RawDocumentPair& pair : data.train) {
    train_set.push_back(vectorize(pair, vocab, config.task));
  }
  std::vector<EncodedInstance> dev_set;
  dev_set.reserve(data.dev.size());
  for (const RawDocumentPair& pair : data.dev) {
    dev_set.push_back(vectorize(pair, vocab, config.task));
  }

  RngState balance_rng = rng.fork(kBalanceStreamSalt);
  train_set = balance_by_resampling(train_set, balance_rng);

  RngState init_rng = rng.fork(kInitStreamSalt);
  ModelParams params = init_params(config.dims, init_rng);
  AdamState adam =
      AdamState::init_like(params, config.alpha, config.beta1, config.beta2, config.eps_hat);

  TrainResult result{params, {}, vocab, adam};
  Gradients grads = Gradients::zeros_like(params);
  double best_f1 = -1.0;

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    RngState epoch_rng = rng.fork(kEpochStreamBase + epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    epoch_rng.shuffle(order);

    double elbo_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(start + config.batch_size, order.size());
      grads.set_zero();
      try {
        for (std::size_t k = start; k < stop; ++k) {
          const ElboBreakdown breakdown = accumulate_elbo_gradients(
              params, train_set[order[k]], epoch_rng, config.mc_samples, grads);
          elbo_sum += breakdown.total;
        }
        // minibatch objective is the mean of the per-instance bounds
        grads.scale(1.0 / static_cast<double>(stop - start));
        adam_step(params, grads, adam);
      } catch (const NumericalError& e) {
        throw NumericalError("epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(start / config.batch_size) + ": " + e.what());
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.elbo_per_datapoint = elbo_sum / static_cast<double>(train_set.size());
    if (!dev_set.empty()) {
      const MetricsReport dev = evaluate(params, dev_set);
      record.dev_accuracy = dev.accuracy;
      record.dev_precision = dev.precision;
      record.dev_recall = dev.recall;
      record.dev_f1 = dev.f1;
    }
    result.history.records.push_back(record);

    // without a dev split there is no selection signal; keep the last epoch
    if (record.dev_f1 > best_f1 || dev_set.empty()) {
      best_f1 = record.dev_f1;
      result.history.best_index = result.history.records.size() - 1;
      result.params = params;
    }
    if (convergence_check(result.history, config.patience)) break;
  }

  result.adam = std::move(adam);
  return result;
}

namespace {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace

std::string history_to_csv(const TrainHistory& history) {
  std::string out = "epoch,elbo_per_datapoint,dev_acc,dev_p,dev_r,dev_f1\n";
  for (const EpochRecord& r : history.records) {
    out += std::to_string(r.epoch) + "," + format_double(r.elbo_per_datapoint) + "," +
           format_double(r.dev_accuracy) + "," + format_double(r.dev_precision) + "," +
           format_double(r.dev_recall) + "," + format_double(r.dev_f1) + "\n";
  }
  return out;
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write history file: " + path.string());
  out << history_to_csv(history);
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace varndrr
