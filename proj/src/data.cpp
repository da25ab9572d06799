#include "varndrr/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace varndrr {

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::COM: return "COM";
    case Relation::CON: return "CON";
    case Relation::EXP: return "EXP";
    case Relation::TEM: return "TEM";
  }
  return "?";
}

std::optional<Relation> parse_relation(std::string_view text) {
  if (text == "COM") return Relation::COM;
  if (text == "CON") return Relation::CON;
  if (text == "EXP") return Relation::EXP;
  if (text == "TEM") return Relation::TEM;
  return std::nullopt;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::size_t dimension)
    : tokens_(std::move(tokens)), dimension_(dimension) {
  if (dimension_ < 2) throw DataError("Vocabulary: dimension must be >= 2");
  if (tokens_.size() > dimension_ - 1)
    throw DataError("Vocabulary: more tokens than indexable slots");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second)
      throw DataError("Vocabulary: duplicate token '" + tokens_[i] + "'");
  }
}

std::size_t Vocabulary::index_or_unk(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? unk_index() : it->second;
}

namespace {

std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
  }
  return out;
}

std::vector<std::string> split_tokens(std::string_view field) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < field.size()) {
    while (i < field.size() && field[i] == ' ') ++i;
    std::size_t start = i;
    while (i < field.size() && field[i] != ' ') ++i;
    if (i > start) tokens.push_back(lowercase_ascii(field.substr(start, i - start)));
  }
  return tokens;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

DatasetSplit load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path.string());

  DatasetSplit out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;

    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      std::size_t tab = rest.find('\t');
      if (tab == std::string_view::npos) {
        fields.push_back(rest);
        break;
      }
      fields.push_back(rest.substr(0, tab));
      rest = rest.substr(tab + 1);
    }
    auto fail = [&](const std::string& why) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 4) {
      fail("expected 4 tab-separated fields, found " + std::to_string(fields.size()));
    }

    RawDocumentPair pair;
    auto relation = parse_relation(fields[1]);
    if (!relation) fail("unknown relation tag '" + std::string(fields[1]) + "'");
    pair.relation = *relation;
    pair.arg1_tokens = split_tokens(fields[2]);
    pair.arg2_tokens = split_tokens(fields[3]);
    if (pair.arg1_tokens.empty() || pair.arg2_tokens.empty()) {
      fail("both argument token lists must be non-empty");
    }

    if (fields[0] == "train") {
      out.train.push_back(std::move(pair));
    } else if (fields[0] == "dev") {
      out.dev.push_back(std::move(pair));
    } else if (fields[0] == "test") {
      out.test.push_back(std::move(pair));
    } else {
      fail("unknown split '" + std::string(fields[0]) + "'");
    }
  }
  return out;
}

namespace {

void write_records(std::ostream& out, std::string_view split_name,
                   const std::vector<RawDocumentPair>& records) {
  for (const RawDocumentPair& r : records) {
    out << split_name << '\t' << to_string(r.relation) << '\t';
    for (std::size_t i = 0; i < r.arg1_tokens.size(); ++i) {
      if (i) out << ' ';
      out << r.arg1_tokens[i];
    }
    out << '\t';
    for (std::size_t i = 0; i < r.arg2_tokens.size(); ++i) {
      if (i) out << ' ';
      out << r.arg2_tokens[i];
    }
    out << '\n';
  }
}

}  // namespace

void write_corpus(const DatasetSplit& split, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file: " + path.string());
  write_records(out, "train", split.train);
  write_records(out, "dev", split.dev);
  write_records(out, "test", split.test);
  if (!out) throw DataError("write failed: " + path.string());
}

Vocabulary build_vocab(const std::vector<RawDocumentPair>& train, std::size_t size) {
  if (size < 2) throw DataError("build_vocab: size must be >= 2");

  std::unordered_map<std::string, std::size_t> counts;
  for (const RawDocumentPair& pair : train) {
    for (const std::string& t : pair.arg1_tokens) ++counts[t];
    for (const std::string& t : pair.arg2_tokens) ++counts[t];
  }

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > size - 1) ranked.resize(size - 1);

  std::vector<std::string> tokens;
  tokens.reserve(ranked.size());
  for (auto& [token, count] : ranked) tokens.push_back(std::move(token));
  return Vocabulary(std::move(tokens), size);
}

EncodedInstance vectorize(const RawDocumentPair& pair, const Vocabulary& vocab,
                          Relation target) {
  EncodedInstance inst;
  inst.x1 = DenseVector(vocab.size());
  inst.x2 = DenseVector(vocab.size());
  for (const std::string& t : pair.arg1_tokens) inst.x1.data[vocab.index_or_unk(t)] = 1.0;
  for (const std::string& t : pair.arg2_tokens) inst.x2.data[vocab.index_or_unk(t)] = 1.0;
  inst.y = pair.relation == target ? DenseVector{1.0, 0.0} : DenseVector{0.0, 1.0};
  return inst;
}

std::vector<EncodedInstance> balance_by_resampling(const std::vector<EncodedInstance>& train,
                                                   RngState& rng) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < train.size(); ++i) {
    (train[i].positive() ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw DataError("balance_by_resampling: both classes must be present (positives=" +
                    std::to_string(pos.size()) + ", negatives=" + std::to_string(neg.size()) +
                    ")");
  }

  std::vector<EncodedInstance> out = train;
  const auto& minority = pos.size() < neg.size() ? pos : neg;
  const std::size_t deficit =
      std::max(pos.size(), neg.size()) - std::min(pos.size(), neg.size());
  out.reserve(out.size() + deficit);
  for (std::size_t k = 0; k < deficit; ++k) {
    out.push_back(train[minority[rng.uniform_index(minority.size())]]);
  }
  rng.shuffle(out);
  return out;
}

namespace {

std::string synth_token(std::size_t id, std::size_t universe) {
  std::size_t width = 1;
  for (std::size_t v = universe > 0 ? universe - 1 : 0; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(id);
  return "w" + std::string(width - digits.size(), '0') + digits;
}

RawDocumentPair synth_record(bool positive, const SynthConfig& cfg,
                             const std::vector<std::string>& pool, RngState& rng) {
  RawDocumentPair pair;
  pair.relation = cfg.target;
  if (!positive) {
    std::array<Relation, 3> others{};
    std::size_t n = 0;
    for (Relation r : kAllRelations) {
      if (r != cfg.target) others[n++] = r;
    }
    pair.relation = others[rng.uniform_index(3)];
  }
  for (auto* arg : {&pair.arg1_tokens, &pair.arg2_tokens}) {
    const std::size_t len =
        cfg.min_tokens + rng.uniform_index(cfg.max_tokens - cfg.min_tokens + 1);
    arg->reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      arg->push_back(pool[rng.uniform_index(pool.size())]);
    }
  }
  return pair;
}

std::vector<RawDocumentPair> synth_split(std::size_t count, double positive_rate,
                                         const SynthConfig& cfg,
                                         const std::vector<std::string>& pos_pool,
                                         const std::vector<std::string>& neg_pool,
                                         RngState& rng) {
  // Exact class counts, shuffled afterwards.
  const auto n_pos = static_cast<std::size_t>(std::llround(positive_rate * count));
  std::vector<RawDocumentPair> records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const bool positive = i < n_pos;
    records.push_back(synth_record(positive, cfg, positive ? pos_pool : neg_pool, rng));
  }
  rng.shuffle(records);
  return records;
}

}  // namespace

SynthCorpus generate_synthetic(const SynthConfig& cfg) {
  if (cfg.token_universe < 4) throw DataError("generate_synthetic: token universe must be >= 4");
  if (cfg.min_tokens == 0 || cfg.max_tokens < cfg.min_tokens)
    throw DataError("generate_synthetic: need 1 <= min_tokens <= max_tokens");
  if (cfg.overlap < 0.0 || cfg.overlap > 1.0)
    throw DataError("generate_synthetic: overlap must be in [0, 1]");

  SynthCorpus out;
  const auto n_shared = static_cast<std::size_t>(std::llround(cfg.overlap * cfg.token_universe));
  const std::size_t n_exclusive = cfg.token_universe - n_shared;
  const std::size_t n_pos = n_exclusive / 2;

  for (std::size_t id = 0; id < cfg.token_universe; ++id) {
    std::string token = synth_token(id, cfg.token_universe);
    if (id < n_pos) {
      out.truth.positive_tokens.push_back(std::move(token));
    } else if (id < n_exclusive) {
      out.truth.negative_tokens.push_back(std::move(token));
    } else {
      out.truth.shared_tokens.push_back(std::move(token));
    }
  }

  std::vector<std::string> pos_pool = out.truth.positive_tokens;
  pos_pool.insert(pos_pool.end(), out.truth.shared_tokens.begin(), out.truth.shared_tokens.end());
  std::vector<std::string> neg_pool = out.truth.negative_tokens;
  neg_pool.insert(neg_pool.end(), out.truth.shared_tokens.begin(), out.truth.shared_tokens.end());
  if (pos_pool.empty() || neg_pool.empty())
    throw DataError("generate_synthetic: a class token pool came out empty");

  RngState base(cfg.seed);
  RngState train_rng = base.fork(101);
  RngState dev_rng = base.fork(102);
  RngState test_rng = base.fork(103);
  out.split.train = synth_split(cfg.train_count, cfg.train_positive_rate, cfg, pos_pool,
                                neg_pool, train_rng);
  out.split.dev = synth_split(cfg.dev_count, cfg.eval_positive_rate, cfg, pos_pool, neg_pool,
                              dev_rng);
  out.split.test = synth_split(cfg.test_count, cfg.eval_positive_rate, cfg, pos_pool,
                               neg_pool, test_rng);
  return out;
}

}  // namespace varndrr
