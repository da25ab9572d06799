#include "varndrr/eval.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace varndrr {

bool predict(const ModelParams& model, const EncodedInstance& inst) {
  const GaussianParams prior = encode_prior(model.phi, inst.x1, inst.x2);
  const DenseVector yp = decode_relation(model.theta, prior.mu);
  return yp.data[0] >= yp.data[1];
}

double positive_probability(const ModelParams& model, const EncodedInstance& inst) {
  const GaussianParams prior = encode_prior(model.phi, inst.x1, inst.x2);
  const DenseVector yp = decode_relation(model.theta, prior.mu);
  return yp.data[0];
}

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                  std::size_t tn) {
  MetricsReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.tn = tn;
  const std::size_t total = tp + fp + fn + tn;
  r.accuracy = total ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
  r.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

MetricsReport compute_metrics(const std::vector<bool>& predictions,
                              const std::vector<bool>& golds) {
  if (predictions.size() != golds.size()) {
    throw std::invalid_argument("compute_metrics: " + std::to_string(predictions.size()) +
                                " predictions vs " + std::to_string(golds.size()) + " golds");
  }
  if (predictions.empty()) {
    throw std::invalid_argument("compute_metrics: empty input");
  }
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] && golds[i]) ++tp;
    else if (predictions[i] && !golds[i]) ++fp;
    else if (!predictions[i] && golds[i]) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

namespace {

// Full-scale PDTB benchmark results for the four one-vs-all tasks,
// kept as data so the rendering path is exercised end to end.
constexpr std::string_view kReferenceTable =
    "COM 63.30 24.00 71.05 35.88\n"
    "CON 53.82 35.39 88.53 50.56\n"
    "EXP 57.36 56.46 97.39 71.48\n"
    "TEM 62.14 17.40 97.65 29.54\n";

std::vector<ReferenceScore> parse_reference_table(std::string_view table) {
  std::vector<ReferenceScore> rows;
  std::istringstream in{std::string(table)};
  std::string tag;
  double acc, prec, rec, f1;
  while (in >> tag >> acc >> prec >> rec >> f1) {
    auto relation = parse_relation(tag);
    if (!relation) throw DataError("reference table: bad relation tag '" + tag + "'");
    rows.push_back({*relation, acc, prec, rec, f1});
  }
  return rows;
}

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

}  // namespace

const std::vector<ReferenceScore>& reference_scores() {
  static const std::vector<ReferenceScore> rows = parse_reference_table(kReferenceTable);
  return rows;
}

std::string format_metrics_table(const MetricsReport& report, Relation task,
                                 std::string_view split_name) {
  std::ostringstream out;
  char line[160];
  out << "task " << to_string(task) << " vs Other, split " << split_name << "\n";
  std::snprintf(line, sizeof(line), "%-24s %8s %8s %8s %8s\n", "", "Acc", "P", "R", "F1");
  out << line;
  std::snprintf(line, sizeof(line), "%-24s %8s %8s %8s %8s\n", "this run",
                pct(report.accuracy).c_str(), pct(report.precision).c_str(),
                pct(report.recall).c_str(), pct(report.f1).c_str());
  out << line;
  for (const ReferenceScore& ref : reference_scores()) {
    if (ref.task != task) continue;
    std::snprintf(line, sizeof(line), "%-24s %8.2f %8.2f %8.2f %8.2f\n",
                  "reference (PDTB, full)", ref.accuracy, ref.precision, ref.recall, ref.f1);
    out << line;
  }
  std::snprintf(line, sizeof(line), "counts: tp=%zu fp=%zu fn=%zu tn=%zu\n", report.tp,
                report.fp, report.fn, report.tn);
  out << line;
  return out.str();
}

namespace {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace

std::string metrics_to_csv(const MetricsReport& r) {
  std::string out = "accuracy,precision,recall,f1,tp,fp,fn,tn\n";
  out += format_double(r.accuracy) + "," + format_double(r.precision) + "," +
         format_double(r.recall) + "," + format_double(r.f1) + "," + std::to_string(r.tp) +
         "," + std::to_string(r.fp) + "," + std::to_string(r.fn) + "," + std::to_string(r.tn) +
         "\n";
  return out;
}

}  // namespace varndrr
