#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "varndrr/numerics.hpp"

namespace varndrr {

// Corpus-level failures: unreadable files, malformed records, bad tags.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The four top-level relation classes.
enum class Relation { COM, CON, EXP, TEM };

inline constexpr std::array<Relation, 4> kAllRelations = {Relation::COM, Relation::CON,
                                                          Relation::EXP, Relation::TEM};

std::string_view to_string(Relation r);
std::optional<Relation> parse_relation(std::string_view text);

// One annotated discourse: the two argument spans (pre-tokenized) and the
// relation holding between them.
struct RawDocumentPair {
  std::vector<std::string> arg1_tokens;
  std::vector<std::string> arg2_tokens;
  Relation relation = Relation::COM;
};

struct DatasetSplit {
  std::vector<RawDocumentPair> train, dev, test;
};

// token -> [0, size-2]; the last index is reserved for unknown words.
// The dimension is always the requested size, even when the corpus has
// fewer distinct tokens.
class Vocabulary {
 public:
  Vocabulary() = default;
  // tokens must already be in index order (index i holds tokens[i]).
  Vocabulary(std::vector<std::string> tokens, std::size_t dimension);

  std::size_t size() const { return dimension_; }       // d_x, unk included
  std::size_t unk_index() const { return dimension_ - 1; }
  std::size_t index_or_unk(std::string_view token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dimension_ = 0;
};

// Binary bag-of-words vectors for the two arguments plus the one-vs-all
// label: y = (1, 0) for the target relation, (0, 1) otherwise.
struct EncodedInstance {
  DenseVector x1, x2, y;
  bool positive() const { return y.data[0] == 1.0; }
};

// Line format, UTF-8, one record per line:
//   split<TAB>relation<TAB>arg1 tokens<TAB>arg2 tokens
// split in {train, dev, test}, relation in {COM, CON, EXP, TEM}, tokens
// space-separated. Tokens are lowercased (ASCII) on load. Blank lines are
// skipped; anything else malformed raises DataError with the line number.
DatasetSplit load_corpus(const std::filesystem::path& path);

// Writes records in the same line format (train, then dev, then test).
void write_corpus(const DatasetSplit& split, const std::filesystem::path& path);

// The (size - 1) most frequent training tokens by raw count, ties broken
// lexicographically; unknown words take the last index. size >= 2.
Vocabulary build_vocab(const std::vector<RawDocumentPair>& train, std::size_t size);

EncodedInstance vectorize(const RawDocumentPair& pair, const Vocabulary& vocab,
                          Relation target);

// Upsamples the minority class uniformly with replacement until both
// classes are equally common, keeps every original instance, and shuffles
// the result. Both classes must be present.
std::vector<EncodedInstance> balance_by_resampling(const std::vector<EncodedInstance>& train,
                                                   RngState& rng);

// Synthetic corpus: two class-conditional unigram distributions over a
// token universe split into a shared pool and two class-exclusive pools.
// overlap = 0 makes the classes disjoint (perfectly separable); overlap = 1
// makes them identical.
struct SynthConfig {
  std::size_t token_universe = 200;  // >= 4
  std::size_t train_count = 2000;
  std::size_t dev_count = 400;
  std::size_t test_count = 400;
  double train_positive_rate = 0.5;
  double eval_positive_rate = 0.3;   // dev/test are kept unbalanced
  double overlap = 0.0;              // shared fraction of the universe
  std::size_t min_tokens = 5, max_tokens = 20;  // per argument
  Relation target = Relation::EXP;
  std::uint64_t seed = 1;
};

struct SynthGroundTruth {
  std::vector<std::string> positive_tokens;  // exclusive to the target class
  std::vector<std::string> negative_tokens;  // exclusive to the other classes
  std::vector<std::string> shared_tokens;
};

struct SynthCorpus {
  DatasetSplit split;
  SynthGroundTruth truth;
};

SynthCorpus generate_synthetic(const SynthConfig& config);

}  // namespace varndrr
