#pragma once

#include <filesystem>
#include <optional>

#include "varndrr/data.hpp"
#include "varndrr/model.hpp"
#include "varndrr/optimizer.hpp"

namespace varndrr {

// A trained model as stored on disk: everything eval/predict need to
// encode inputs and run the forward pass, exactly as trained.
struct LoadedCheckpoint {
  ModelParams params;
  Vocabulary vocab;
  Relation task = Relation::EXP;
  std::uint64_t seed = 0;
  std::optional<AdamState> adam;  // present when saved from training
};

// Binary container, little-endian, doubles stored bit-exactly: magic and
// version, dimensions, seed, task, vocabulary, then every parameter array
// with its name and shape, then optionally the Adam state. Loading
// validates every recorded shape against the recorded dimensions and
// fails with the offending array named.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params,
                     const Vocabulary& vocab, Relation task, std::uint64_t seed,
                     const AdamState* adam = nullptr);

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace varndrr
