#include "gesturegan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "gesturegan/config.hpp"
#include "gesturegan/errors.hpp"

namespace gesturegan {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[4] = {'G', 'G', 'C', 'K'};

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }

void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  void take(void* dst, std::size_t n) {
    if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint is truncated");
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    take(&v, 4);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint is truncated");
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string bytes_;
  std::size_t pos_ = 0;
};

using TensorMap = std::map<std::string, Matrix>;

void add_vector(TensorMap& t, const std::string& name, const Vector& v) { t[name] = v; }

TensorMap collect_tensors(const TrainState& s) {
  TensorMap t;
  std::vector<std::string> g_names, d_names;
  s.model.generator.visit([&](const std::string& n, const Parameter& p) {
    t[n] = p.value;
    g_names.push_back(n);
  });
  s.model.discriminator.visit([&](const std::string& n, const Parameter& p) {
    t[n] = p.value;
    d_names.push_back(n);
  });
  auto add_moments = [&](const std::string& prefix, const std::vector<std::string>& names, const AdamState& a) {
    for (std::size_t i = 0; i < a.first_moment.size() && i < names.size(); ++i) {
      t[prefix + ".m." + names[i]] = a.first_moment[i];
      t[prefix + ".v." + names[i]] = a.second_moment[i];
    }
  };
  add_moments("adam.generator", g_names, s.generator_opt);
  add_moments("adam.discriminator", d_names, s.discriminator_opt);
  add_vector(t, "stats.feature_mean", s.model.stats.feature_mean);
  add_vector(t, "stats.feature_std", s.model.stats.feature_std);
  add_vector(t, "stats.pose_mean", s.model.stats.pose_mean);
  add_vector(t, "stats.pose_std", s.model.stats.pose_std);
  return t;
}

std::map<std::string, std::string> collect_strings(const TrainState& s) {
  std::map<std::string, std::string> m;
  for (const auto& [k, v] : s.metadata) m["meta." + k] = v;
  m["config"] = config_echo(s.config);
  m["state.epoch"] = std::to_string(s.epoch);
  m["state.step"] = std::to_string(s.step);
  m["adam.generator.step"] = std::to_string(s.generator_opt.step);
  m["adam.discriminator.step"] = std::to_string(s.discriminator_opt.step);
  m["model.pose_dim"] = std::to_string(s.model.dims.pose_dim);
  m["model.text_dim"] = std::to_string(s.model.dims.text_dim);
  return m;
}

const std::string& need_string(const std::map<std::string, std::string>& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw CheckpointError("checkpoint lacks entry '" + key + "'");
  return it->second;
}

std::int64_t need_int(const std::map<std::string, std::string>& m, const std::string& key) {
  const std::string& v = need_string(m, key);
  try {
    return std::stoll(v);
  } catch (const std::exception&) {
    throw CheckpointError("checkpoint entry '" + key + "' is not an integer");
  }
}

const Matrix& take_tensor(const TensorMap& t, const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  const auto it = t.find(name);
  if (it == t.end()) throw ShapeError("tensor '" + name + "' is missing from the checkpoint");
  if (it->second.rows() != rows || it->second.cols() != cols) {
    throw ShapeError("tensor '" + name + "' has shape " + std::to_string(it->second.rows()) + "x" +
                     std::to_string(it->second.cols()) + ", expected " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  return it->second;
}

void restore_moments(const TensorMap& t, const std::string& prefix, const std::vector<Parameter*>& params,
                     const std::vector<std::string>& names, AdamState& a) {
  if (a.step == 0 && t.find(prefix + ".m." + names.front()) == t.end()) return;
  a.first_moment.clear();
  a.second_moment.clear();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto r = params[i]->value.rows(), c = params[i]->value.cols();
    a.first_moment.push_back(take_tensor(t, prefix + ".m." + names[i], r, c));
    a.second_moment.push_back(take_tensor(t, prefix + ".v." + names[i], r, c));
  }
}

struct RawCheckpoint {
  TensorMap tensors;
  std::map<std::string, std::string> strings;
};

RawCheckpoint read_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Reader r(ss.str());
  char magic[4];
  r.take(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw CheckpointError(path + " is not a checkpoint (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  RawCheckpoint raw;
  const std::uint32_t n_tensors = r.u32();
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = r.str();
    const std::uint32_t rank = r.u32();
    if (rank != 2) throw CheckpointError("tensor '" + name + "' has unsupported rank " + std::to_string(rank));
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    std::vector<float> data(static_cast<std::size_t>(rows) * cols);
    r.take(data.data(), data.size() * sizeof(float));
    Matrix m(rows, cols);
    for (std::uint32_t a = 0; a < rows; ++a) {
      for (std::uint32_t b = 0; b < cols; ++b) m(a, b) = data[static_cast<std::size_t>(a) * cols + b];
    }
    raw.tensors[std::move(name)] = std::move(m);
  }
  const std::uint32_t n_strings = r.u32();
  for (std::uint32_t i = 0; i < n_strings; ++i) {
    std::string k = r.str();
    raw.strings[std::move(k)] = r.str();
  }
  if (!r.done()) throw CheckpointError("trailing bytes after checkpoint data");
  return raw;
}

TrainState rebuild(const RawCheckpoint& raw, const TrainConfig& cfg) {
  TrainState s;
  s.config = cfg;
  const int pose_dim = static_cast<int>(need_int(raw.strings, "model.pose_dim"));
  const int text_dim = static_cast<int>(need_int(raw.strings, "model.text_dim"));
  s.model.dims = model_dims(cfg, pose_dim, text_dim);
  s.model.generator = Generator(s.model.dims);
  s.model.discriminator = Discriminator(s.model.dims);

  std::vector<std::string> g_names, d_names;
  s.model.generator.visit([&](const std::string& n, Parameter& p) {
    p.value = take_tensor(raw.tensors, n, p.value.rows(), p.value.cols());
    g_names.push_back(n);
  });
  s.model.discriminator.visit([&](const std::string& n, Parameter& p) {
    p.value = take_tensor(raw.tensors, n, p.value.rows(), p.value.cols());
    d_names.push_back(n);
  });

  const int fd = s.model.dims.speech_dim();
  Standardizer& st = s.model.stats;
  st.feature_mean = take_tensor(raw.tensors, "stats.feature_mean", fd, 1);
  st.feature_std = take_tensor(raw.tensors, "stats.feature_std", fd, 1);
  st.pose_mean = take_tensor(raw.tensors, "stats.pose_mean", pose_dim, 1);
  st.pose_std = take_tensor(raw.tensors, "stats.pose_std", pose_dim, 1);

  s.epoch = need_int(raw.strings, "state.epoch");
  s.step = need_int(raw.strings, "state.step");
  s.generator_opt.step = need_int(raw.strings, "adam.generator.step");
  s.discriminator_opt.step = need_int(raw.strings, "adam.discriminator.step");
  restore_moments(raw.tensors, "adam.generator", s.model.generator.parameters(), g_names, s.generator_opt);
  restore_moments(raw.tensors, "adam.discriminator", s.model.discriminator.parameters(), d_names,
                  s.discriminator_opt);
  for (const auto& [k, v] : raw.strings) {
    if (k.rfind("meta.", 0) == 0) s.metadata[k.substr(5)] = v;
  }
  return s;
}

}  // namespace

void save_checkpoint(const TrainState& state, const std::string& path) {
  const TensorMap tensors = collect_tensors(state);
  const auto strings = collect_strings(state);
  std::ostringstream os;
  os.write(kMagic, 4);
  put_u32(os, kCheckpointVersion);
  put_u32(os, static_cast<std::uint32_t>(tensors.size()));
  std::vector<float> buf;
  for (const auto& [name, m] : tensors) {
    put_string(os, name);
    put_u32(os, 2);
    put_u32(os, static_cast<std::uint32_t>(m.rows()));
    put_u32(os, static_cast<std::uint32_t>(m.cols()));
    buf.resize(static_cast<std::size_t>(m.size()));
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
      for (Eigen::Index b = 0; b < m.cols(); ++b) buf[a * m.cols() + b] = static_cast<float>(m(a, b));
    }
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  put_u32(os, static_cast<std::uint32_t>(strings.size()));
  for (const auto& [k, v] : strings) {
    put_string(os, k);
    put_string(os, v);
  }
  // Write to a sibling file first so an interrupted save leaves the old one.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint " + path);
    const std::string bytes = os.str();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("failed writing checkpoint " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw CheckpointError("cannot move checkpoint into " + path);
}

TrainState load_checkpoint(const std::string& path) {
  const RawCheckpoint raw = read_raw(path);
  TrainConfig cfg;
  try {
    cfg = parse_train_config(need_string(raw.strings, "config"));
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("stored configuration is invalid: ") + e.what());
  }
  return rebuild(raw, cfg);
}

TrainState load_checkpoint(const std::string& path, const TrainConfig& expected) {
  return rebuild(read_raw(path), expected);
}

bool states_identical(const TrainState& a, const TrainState& b) {
  const TensorMap ta = collect_tensors(a), tb = collect_tensors(b);
  if (ta.size() != tb.size()) return false;
  for (const auto& [name, m] : ta) {
    const auto it = tb.find(name);
    if (it == tb.end() || it->second.rows() != m.rows() || it->second.cols() != m.cols()) return false;
    if (m.size() > 0 &&
        std::memcmp(m.data(), it->second.data(), static_cast<std::size_t>(m.size()) * sizeof(double)) != 0) {
      return false;
    }
  }
  return collect_strings(a) == collect_strings(b);
}

}  // namespace gesturegan
