#include "gesturegan/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gesturegan/errors.hpp"

namespace gesturegan {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class F>
void for_each_line(const std::string& text, F&& on_pair) {
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(number, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(number, "empty key");
    try {
      on_pair(key, value);
    } catch (const ConfigError& e) {
      if (e.line() > 0) throw;
      throw ConfigError(number, e.what());
    }
  }
}

}  // namespace

bool set_train_key(TrainConfig& c, const std::string& k, const std::string& v) {
  if (k == "alpha") c.alpha = to_double(k, v);
  else if (k == "beta") c.beta = to_double(k, v);
  else if (k == "lambda") c.lambda = to_double(k, v);
  else if (k == "learning_rate") c.learning_rate = to_double(k, v);
  else if (k == "adam_beta1") c.adam_beta1 = to_double(k, v);
  else if (k == "adam_beta2") c.adam_beta2 = to_double(k, v);
  else if (k == "batch_size") c.batch_size = static_cast<int>(to_int(k, v));
  else if (k == "epochs") c.epochs = static_cast<int>(to_int(k, v));
  else if (k == "chunk") c.chunk = static_cast<int>(to_int(k, v));
  else if (k == "chunk_stride") c.chunk_stride = static_cast<int>(to_int(k, v));
  else if (k == "window") c.window = static_cast<int>(to_int(k, v));
  else if (k == "prev_poses") c.prev_poses = static_cast<int>(to_int(k, v));
  else if (k == "noise_dim") c.noise_dim = static_cast<int>(to_int(k, v));
  else if (k == "dropout") c.dropout = to_double(k, v);
  else if (k == "seed") c.seed = to_uint(k, v);
  else if (k == "no_text") c.no_text = to_bool(k, v);
  else if (k == "no_audio") c.no_audio = to_bool(k, v);
  else if (k == "no_gru") c.no_gru = to_bool(k, v);
  else if (k == "no_film") c.no_film = to_bool(k, v);
  else if (k == "audio_features") c.audio_features = parse_audio_feature_kind(v);
  else if (k == "adversarial") c.adversarial = parse_adversarial_mode(v);
  else if (k == "clip_value") c.clip_value = to_double(k, v);
  else return false;
  return true;
}

TrainConfig parse_train_config(const std::string& text) {
  TrainConfig cfg;
  for_each_line(text, [&](const std::string& k, const std::string& v) {
    if (!set_train_key(cfg, k, v)) throw ConfigError("unknown key '" + k + "'");
  });
  return cfg;
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig c;
  for_each_line(text, [&](const std::string& k, const std::string& v) {
    if (set_train_key(c.train, k, v)) return;
    if (k == "data_dir") c.data_dir = v;
    else if (k == "motion_dir") c.motion_dir = v;
    else if (k == "audio_dir") c.audio_dir = v;
    else if (k == "transcript_dir") c.transcript_dir = v;
    else if (k == "cache_dir") c.cache_dir = v;
    else if (k == "output_dir") c.output_dir = v;
    else if (k == "joints") {
      c.joints = split_list(v);
      if (c.joints.empty()) throw ConfigError("joints: list is empty");
    } else if (k == "embedding") {
      if (v == "stub") c.embedding = EmbeddingKind::Stub;
      else if (v == "pretrained") c.embedding = EmbeddingKind::Pretrained;
      else throw ConfigError("embedding: expected stub or pretrained, got '" + v + "'");
    } else if (k == "embedding_command") c.embedding_command = v;
    else if (k == "embedding_seed") c.embedding_seed = to_uint(k, v);
    else if (k == "embedding_dim") c.embedding_dim = static_cast<int>(to_int(k, v));
    else if (k == "eval_samples") c.eval_samples = static_cast<int>(to_int(k, v));
    else throw ConfigError("unknown key '" + k + "'");
  });
  if (c.embedding == EmbeddingKind::Pretrained && c.embedding_command.empty()) {
    throw ConfigError("embedding = pretrained requires embedding_command");
  }
  if (c.embedding_dim < 1) throw ConfigError("embedding_dim must be positive");
  if (c.eval_samples < 1) throw ConfigError("eval_samples must be positive");
  c.train.validate();
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string PipelineConfig::resolve(const std::string& dir) const {
  const std::filesystem::path p(dir);
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(data_dir) / p).string();
}

}  // namespace gesturegan
