#pragma once

#include <memory>
#include <string>

#include "gesturegan/audio.hpp"
#include "gesturegan/config.hpp"
#include "gesturegan/evaluation.hpp"
#include "gesturegan/text.hpp"

namespace gesturegan {

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const PipelineConfig& cfg);

// Speech features for one recording at 20 FPS, truncated or padded to
// frames rows (frames < 0: use the audio frame count).
struct SpeechInputs {
  Matrix text;
  std::map<AudioFeatureKind, Matrix> audio;
  int frames() const { return static_cast<int>(text.rows()); }
};

SpeechInputs extract_speech(const AudioTrack& audio, const Transcript& transcript, EmbeddingProvider& provider,
                            int frames = -1);

struct ProcessedUtterance {
  CorpusUtterance utterance;
  JointHierarchy skeleton;
};

// BVH -> joint selection -> 20 FPS -> ExpMap; WAV and transcript -> features.
// All streams are truncated to the shortest.
ProcessedUtterance process_utterance(const std::string& name, const std::string& bvh_path,
                                     const std::string& wav_path, const std::string& transcript_path,
                                     const JointSelection& joints, EmbeddingProvider& provider);

struct PrepareReport {
  int utterances = 0;
  DatasetSplit split;
};

// Scans motion_dir for *.bvh with matching audio (*.wav) and transcript
// (*.json), writes per-utterance GGF1 caches, skeleton.bvh and split.tsv
// into cache_dir.
PrepareReport prepare_dataset(const PipelineConfig& cfg);

// Reads back what prepare_dataset wrote.
AblationCorpus load_corpus(const PipelineConfig& cfg);

// Speech features ready for generate_sequence under the model's flags.
Matrix model_speech(const SpeechInputs& s, const GestureModel& model, AudioFeatureKind kind);

// Euler clip (degrees, hierarchy channel orders) for writing to BVH.
MotionClip to_bvh_clip(const JointHierarchy& skeleton, const MotionClip& expmap_clip);

}  // namespace gesturegan
