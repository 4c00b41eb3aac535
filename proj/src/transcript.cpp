#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "gesturegan/errors.hpp"
#include "gesturegan/text.hpp"
#include "json.hpp"

namespace gesturegan {
namespace {

std::string normalize(std::string_view word) {
  std::string out;
  for (char c : word) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '\'') out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

const std::unordered_set<std::string>& stop_set() {
  static const std::unordered_set<std::string> set(non_semantic_words().begin(), non_semantic_words().end());
  return set;
}

double seconds(const nlohmann::json& v, const char* key, std::size_t index) {
  if (!v.contains(key)) {
    throw InvalidInputError("word " + std::to_string(index) + " lacks '" + key + "'");
  }
  const auto& x = v.at(key);
  if (x.is_number()) return x.get<double>();
  // Cloud ASR output writes times as strings like "1.300s".
  if (x.is_string()) {
    std::string s = x.get<std::string>();
    if (!s.empty() && s.back() == 's') s.pop_back();
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  throw InvalidInputError("word " + std::to_string(index) + " has a non-numeric '" + key + "'");
}

}  // namespace

const std::vector<std::string>& non_semantic_words() {
  static const std::vector<std::string> words = {
      // fillers and backchannels
      "uh", "um", "umm", "erm", "er", "ah", "eh", "hmm", "mm", "mhm", "uhm", "oh", "huh",
      // articles and determiners
      "a", "an", "the",
      // conjunctions
      "and", "or", "but", "so", "if", "because", "than",
      // prepositions
      "of", "to", "in", "on", "at", "for", "with", "from", "by", "as", "into", "about",
      // auxiliaries
      "is", "are", "was", "were", "be", "been", "am", "do", "does", "did",
      // pronouns
      "i", "it", "you", "he", "she", "we", "they", "me", "him", "her", "us", "them",
      // discourse particles
      "well", "like", "just", "yeah", "okay", "ok"};
  return words;
}

bool is_non_semantic(std::string_view word) {
  const std::string w = normalize(word);
  return w.empty() || stop_set().contains(w);
}

Transcript parse_transcript(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInputError(std::string("transcript is not valid JSON: ") + e.what());
  }
  const nlohmann::json* arr = &doc;
  if (doc.is_object()) {
    if (!doc.contains("words")) throw InvalidInputError("transcript object lacks a 'words' array");
    arr = &doc.at("words");
  }
  if (!arr->is_array()) throw InvalidInputError("transcript words must be an array");

  Transcript tr;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const auto& w = (*arr)[i];
    if (!w.is_object() || !w.contains("word") || !w.at("word").is_string()) {
      throw InvalidInputError("word " + std::to_string(i) + " lacks a 'word' string");
    }
    Word word;
    word.text = w.at("word").get<std::string>();
    word.start = seconds(w, w.contains("start") ? "start" : "start_time", i);
    word.end = seconds(w, w.contains("end") ? "end" : "end_time", i);
    if (!(word.start < word.end)) {
      throw InvalidInputError("word " + std::to_string(i) + " ('" + word.text + "') has end <= start");
    }
    if (!tr.words.empty() && word.start < tr.words.back().end) {
      throw InvalidInputError("word " + std::to_string(i) + " ('" + word.text +
                              "') overlaps or precedes the previous word");
    }
    word.has_semantics = !is_non_semantic(word.text);
    tr.words.push_back(std::move(word));
  }
  return tr;
}

Transcript read_transcript_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open transcript: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_transcript(ss.str());
}

Matrix embed_words(const Transcript& tr, EmbeddingProvider& provider) {
  const int dim = provider.dimension();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(tr.words.size()), dim);
  if (tr.words.empty()) return out;
  std::vector<std::string> sentence;
  sentence.reserve(tr.words.size());
  for (const Word& w : tr.words) sentence.push_back(w.text);
  const Matrix vecs = provider.embed(sentence);
  if (vecs.rows() != out.rows() || vecs.cols() != dim) {
    throw ProviderError("embedding provider returned " + std::to_string(vecs.rows()) + "x" +
                        std::to_string(vecs.cols()) + " for " + std::to_string(out.rows()) + " words");
  }
  for (std::size_t i = 0; i < tr.words.size(); ++i) {
    if (tr.words[i].has_semantics) out.row(static_cast<Eigen::Index>(i)) = vecs.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

FeatureSequence align_text_to_frames(const Transcript& tr, const Matrix& word_vectors, int n_frames) {
  if (word_vectors.rows() != static_cast<Eigen::Index>(tr.words.size())) {
    throw InvalidInputError("one vector per word is required");
  }
  FeatureSequence out;
  out.kind = FeatureKind::Text;
  const Eigen::Index dim = word_vectors.cols() > 0 ? word_vectors.cols() : kTextDim;
  out.frames = Matrix::Zero(n_frames, dim);
  std::size_t w = 0;
  for (int f = 0; f < n_frames; ++f) {
    const double t = f / kFeatureFps;
    while (w < tr.words.size() && tr.words[w].end <= t) ++w;
    if (w < tr.words.size() && tr.words[w].start <= t) {
      out.frames.row(f) = word_vectors.row(static_cast<Eigen::Index>(w));
    }
  }
  return out;
}

}  // namespace gesturegan
