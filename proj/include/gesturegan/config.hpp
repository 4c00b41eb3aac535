#pragma once

#include <string>
#include <vector>

#include "gesturegan/training.hpp"

namespace gesturegan {

enum class EmbeddingKind { Stub, Pretrained };

struct PipelineConfig {
  TrainConfig train;

  std::string data_dir = ".";
  std::string motion_dir = "motion";
  std::string audio_dir = "audio";
  std::string transcript_dir = "transcripts";
  std::string cache_dir = "cache";
  std::string output_dir = "out";
  std::vector<std::string> joints = JointSelection::upper_body_default().names;

  EmbeddingKind embedding = EmbeddingKind::Stub;
  std::string embedding_command;  // required for pretrained
  std::uint64_t embedding_seed = 0;
  int embedding_dim = kTextDim;

  int eval_samples = 50;

  // Directories resolved against data_dir unless absolute.
  std::string resolve(const std::string& dir) const;
};

// key = value lines; '#' starts a comment. Unknown keys and malformed values
// raise ConfigError with the offending line. Missing keys keep defaults.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);

// Parses the output of config_echo.
TrainConfig parse_train_config(const std::string& text);

// Sets one TrainConfig field; returns false if key is not a training key.
bool set_train_key(TrainConfig& cfg, const std::string& key, const std::string& value);

}  // namespace gesturegan
