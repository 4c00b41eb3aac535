#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gesturegan/features.hpp"

namespace gesturegan {

struct Word {
  std::string text;
  double start = 0.0;  // seconds
  double end = 0.0;
  bool has_semantics = true;
};

struct Transcript {
  std::vector<Word> words;
};

// True for words carrying no semantic content: fillers, articles,
// conjunctions, prepositions and the like. Case- and punctuation-insensitive.
bool is_non_semantic(std::string_view word);
const std::vector<std::string>& non_semantic_words();

// Accepts a JSON array of {"word", "start", "end"} objects, or an object
// holding such an array under "words".
Transcript parse_transcript(std::string_view json_text);
Transcript read_transcript_file(const std::string& path);

// Contextual word encoder: the whole transcript is the sentence.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dimension() const { return kTextDim; }
  // One row per word of the sentence.
  virtual Matrix embed(std::span<const std::string> sentence) = 0;
};

// Deterministic seeded-hash vectors in [-1, 1), a function of the word text.
class StubEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit StubEmbeddingProvider(std::uint64_t seed = 0, int dimension = kTextDim)
      : seed_(seed), dim_(dimension) {}
  int dimension() const override { return dim_; }
  Matrix embed(std::span<const std::string> sentence) override;
  Vector embed_word(std::string_view word) const;

 private:
  std::uint64_t seed_;
  int dim_;
};

// Runs an external encoder. The command reads the sentence on stdin, one word
// per line, and writes one GGF1 row per word to stdout.
class SubprocessEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit SubprocessEmbeddingProvider(std::string command, int dimension = kTextDim)
      : command_(std::move(command)), dim_(dimension) {}
  int dimension() const override { return dim_; }
  Matrix embed(std::span<const std::string> sentence) override;

 private:
  std::string command_;
  int dim_;
};

// Semantic words get the provider's vector, the rest the fixed zero vector.
Matrix embed_words(const Transcript& tr, EmbeddingProvider& provider);

// Frame f (time f / 20 s) takes the vector of the word whose [start, end)
// contains it; frames outside every word take the zero vector.
FeatureSequence align_text_to_frames(const Transcript& tr, const Matrix& word_vectors, int n_frames);

}  // namespace gesturegan
