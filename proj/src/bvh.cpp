#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gesturegan/errors.hpp"
#include "gesturegan/motion.hpp"

namespace gesturegan {
namespace {

struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(std::string_view text, int first_line, int last_line,
                            const std::vector<std::string_view>& lines) {
  std::vector<Token> out;
  for (int ln = first_line; ln < last_line; ++ln) {
    std::string_view l = lines[ln];
    std::size_t i = 0;
    while (i < l.size()) {
      while (i < l.size() && std::isspace(static_cast<unsigned char>(l[i]))) ++i;
      std::size_t j = i;
      while (j < l.size() && !std::isspace(static_cast<unsigned char>(l[j]))) ++j;
      if (j > i) out.push_back({std::string(l.substr(i, j - i)), ln + 1});
      i = j;
    }
  }
  (void)text;
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(start, end - start);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back(l);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::optional<Channel> parse_channel(std::string_view s) {
  static const std::pair<std::string_view, Channel> kNames[] = {
      {"Xposition", Channel::Xposition}, {"Yposition", Channel::Yposition},
      {"Zposition", Channel::Zposition}, {"Xrotation", Channel::Xrotation},
      {"Yrotation", Channel::Yrotation}, {"Zrotation", Channel::Zrotation}};
  for (const auto& [name, c] : kNames) {
    if (s == name) return c;
  }
  return std::nullopt;
}

class HierarchyParser {
 public:
  explicit HierarchyParser(const std::vector<Token>& tokens) : tokens_(tokens) {}

  JointHierarchy parse() {
    expect("HIERARCHY");
    expect("ROOT");
    parse_joint(-1);
    if (pos_ != tokens_.size()) fail("unexpected token '" + tokens_[pos_].text + "'");
    h_.validate();
    return std::move(h_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    const int line = pos_ < tokens_.size() ? tokens_[pos_].line
                                           : (tokens_.empty() ? 1 : tokens_.back().line);
    throw ParseError(line, msg);
  }

  const Token& next() {
    if (pos_ >= tokens_.size()) fail("unexpected end of hierarchy");
    return tokens_[pos_++];
  }

  void expect(std::string_view word) {
    if (pos_ >= tokens_.size() || tokens_[pos_].text != word) {
      fail("expected '" + std::string(word) + "'");
    }
    ++pos_;
  }

  Vec3 parse_offset() {
    expect("OFFSET");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      const Token& t = next();
      if (!parse_double(t.text, v[i])) throw ParseError(t.line, "bad offset value '" + t.text + "'");
    }
    return v;
  }

  void parse_joint(int parent) {
    const Token& name = next();
    Joint joint;
    joint.name = name.text;
    // Names with spaces: join tokens up to the opening brace on the same line.
    while (pos_ < tokens_.size() && tokens_[pos_].text != "{" && tokens_[pos_].line == name.line) {
      joint.name += " " + next().text;
    }
    joint.parent = parent;
    expect("{");
    joint.offset = parse_offset();
    expect("CHANNELS");
    const Token& count_tok = next();
    int count = 0;
    auto [p, ec] = std::from_chars(count_tok.text.data(), count_tok.text.data() + count_tok.text.size(), count);
    if (ec != std::errc() || count < 0 || count > 6) {
      throw ParseError(count_tok.line, "bad channel count '" + count_tok.text + "'");
    }
    for (int i = 0; i < count; ++i) {
      const Token& t = next();
      auto c = parse_channel(t.text);
      if (!c) throw ParseError(t.line, "unknown channel '" + t.text + "'");
      joint.channels.push_back(*c);
    }
    int rotations = 0;
    for (Channel c : joint.channels) rotations += (c >= Channel::Xrotation) ? 1 : 0;
    if (rotations != 3) {
      throw ParseError(count_tok.line, "joint '" + joint.name + "' must have three rotation channels");
    }
    const int index = static_cast<int>(h_.joints.size());
    h_.joints.push_back(std::move(joint));

    while (true) {
      if (pos_ >= tokens_.size()) fail("unterminated joint block");
      const std::string& word = tokens_[pos_].text;
      if (word == "}") {
        ++pos_;
        return;
      }
      if (word == "JOINT") {
        ++pos_;
        parse_joint(index);
      } else if (word == "End") {
        ++pos_;
        expect("Site");
        expect("{");
        h_.end_sites.push_back({index, parse_offset()});
        expect("}");
      } else {
        fail("unexpected token '" + word + "'");
      }
    }
  }

  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
  JointHierarchy h_;
};

int total_channels(const JointHierarchy& h) {
  int n = 0;
  for (const Joint& j : h.joints) n += static_cast<int>(j.channels.size());
  return n;
}

void write_joint(std::ostringstream& os, const JointHierarchy& h,
                 const std::vector<std::vector<int>>& children, int index, int depth) {
  const std::string indent(depth, '\t');
  const Joint& j = h.joints[index];
  os << indent << (j.parent < 0 ? "ROOT " : "JOINT ") << j.name << "\n" << indent << "{\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "OFFSET %.6f %.6f %.6f", j.offset.x(), j.offset.y(), j.offset.z());
  os << indent << "\t" << buf << "\n";
  os << indent << "\tCHANNELS " << j.channels.size();
  for (Channel c : j.channels) os << " " << channel_name(c);
  os << "\n";
  for (int c : children[index]) write_joint(os, h, children, c, depth + 1);
  for (const EndSite& e : h.end_sites) {
    if (e.parent != index) continue;
    std::snprintf(buf, sizeof(buf), "OFFSET %.6f %.6f %.6f", e.offset.x(), e.offset.y(), e.offset.z());
    os << indent << "\tEnd Site\n" << indent << "\t{\n" << indent << "\t\t" << buf << "\n"
       << indent << "\t}\n";
  }
  os << indent << "}\n";
}

}  // namespace

std::string_view channel_name(Channel c) {
  switch (c) {
    case Channel::Xposition: return "Xposition";
    case Channel::Yposition: return "Yposition";
    case Channel::Zposition: return "Zposition";
    case Channel::Xrotation: return "Xrotation";
    case Channel::Yrotation: return "Yrotation";
    case Channel::Zrotation: return "Zrotation";
  }
  return "?";
}

RotationOrder Joint::rotation_order() const {
  std::array<Axis, 3> axes{};
  int n = 0;
  for (Channel c : channels) {
    if (c >= Channel::Xrotation && n < 3) {
      axes[n++] = static_cast<Axis>(static_cast<int>(c) - static_cast<int>(Channel::Xrotation));
    }
  }
  if (n != 3) throw InvalidInputError("joint '" + name + "' lacks three rotation channels");
  return RotationOrder(axes[0], axes[1], axes[2]);
}

bool Joint::has_position_channels() const {
  for (Channel c : channels) {
    if (c < Channel::Xrotation) return true;
  }
  return false;
}

std::optional<int> JointHierarchy::find(std::string_view name) const {
  for (int i = 0; i < size(); ++i) {
    if (joints[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::vector<int>> JointHierarchy::children() const {
  std::vector<std::vector<int>> out(joints.size());
  for (int i = 1; i < size(); ++i) out[joints[i].parent].push_back(i);
  return out;
}

void JointHierarchy::validate() const {
  if (joints.empty()) throw InvalidInputError("hierarchy has no joints");
  if (joints[0].parent != -1) throw InvalidInputError("joint 0 must be the root");
  for (int i = 1; i < size(); ++i) {
    if (joints[i].parent < 0 || joints[i].parent >= i) {
      throw InvalidInputError("joint '" + joints[i].name + "' breaks topological order");
    }
  }
  for (const Joint& j : joints) {
    if (!j.offset.allFinite()) throw InvalidInputError("non-finite offset on '" + j.name + "'");
  }
}

BvhData parse_bvh(std::string_view text) {
  const auto lines = split_lines(text);
  int motion_line = -1;
  for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
    std::string_view l = lines[i];
    while (!l.empty() && std::isspace(static_cast<unsigned char>(l.front()))) l.remove_prefix(1);
    if (l.substr(0, 6) == "MOTION") {
      motion_line = i;
      break;
    }
  }
  if (motion_line < 0) throw ParseError(static_cast<int>(lines.size()), "missing MOTION section");

  const auto tokens = tokenize(text, 0, motion_line, lines);
  BvhData out;
  out.hierarchy = HierarchyParser(tokens).parse();
  const JointHierarchy& h = out.hierarchy;

  int ln = motion_line + 1;
  auto next_nonempty = [&]() -> std::string_view {
    while (ln < static_cast<int>(lines.size())) {
      std::string_view l = lines[ln];
      if (l.find_first_not_of(" \t") != std::string_view::npos) return l;
      ++ln;
    }
    throw ParseError(ln, "unexpected end of MOTION section");
  };
  auto header_value = [&](std::string_view key) -> std::string_view {
    std::string_view l = next_nonempty();
    const auto start = l.find_first_not_of(" \t");
    l.remove_prefix(start);
    if (l.substr(0, key.size()) != key) throw ParseError(ln + 1, "expected '" + std::string(key) + "'");
    l.remove_prefix(key.size());
    while (!l.empty() && std::isspace(static_cast<unsigned char>(l.front()))) l.remove_prefix(1);
    while (!l.empty() && std::isspace(static_cast<unsigned char>(l.back()))) l.remove_suffix(1);
    return l;
  };

  std::string_view frames_text = header_value("Frames:");
  int frame_count = 0;
  {
    auto [p, ec] = std::from_chars(frames_text.data(), frames_text.data() + frames_text.size(), frame_count);
    if (ec != std::errc() || p != frames_text.data() + frames_text.size() || frame_count < 0) {
      throw ParseError(ln + 1, "bad frame count");
    }
  }
  ++ln;
  double frame_time = 0.0;
  if (!parse_double(header_value("Frame Time:"), frame_time) || frame_time <= 0.0) {
    throw ParseError(ln + 1, "bad frame time");
  }
  ++ln;

  const int width = total_channels(h);
  Matrix raw(frame_count, width);
  for (int f = 0; f < frame_count; ++f) {
    std::string_view l = next_nonempty();
    const int row_line = ln + 1;
    int col = 0;
    std::size_t i = 0;
    while (i < l.size()) {
      while (i < l.size() && std::isspace(static_cast<unsigned char>(l[i]))) ++i;
      std::size_t j = i;
      while (j < l.size() && !std::isspace(static_cast<unsigned char>(l[j]))) ++j;
      if (j > i) {
        double v = 0.0;
        if (!parse_double(l.substr(i, j - i), v)) {
          throw ParseError(row_line, "non-numeric value '" + std::string(l.substr(i, j - i)) +
                                         "' in frame " + std::to_string(f));
        }
        if (col >= width) {
          throw ParseError(row_line, "frame " + std::to_string(f) + " has more than " +
                                         std::to_string(width) + " values");
        }
        raw(f, col++) = v;
      }
      i = j;
    }
    if (col != width) {
      throw ParseError(row_line, "frame " + std::to_string(f) + " has " + std::to_string(col) +
                                     " values, expected " + std::to_string(width));
    }
    ++ln;
  }

  MotionClip& clip = out.clip;
  clip.fps = 1.0 / frame_time;
  clip.representation = Representation::Euler;
  clip.frames.resize(frame_count, 3 * h.size());
  const bool root_translation = h.joints[0].has_position_channels();
  if (root_translation) clip.root_translation = Matrix::Zero(frame_count, 3);
  int col = 0;
  for (int j = 0; j < h.size(); ++j) {
    int rot = 0;
    for (Channel c : h.joints[j].channels) {
      if (c >= Channel::Xrotation) {
        clip.frames.col(3 * j + rot++) = raw.col(col);
      } else if (j == 0) {
        clip.root_translation.col(static_cast<int>(c)) = raw.col(col);
      }
      ++col;
    }
  }
  return out;
}

BvhData read_bvh_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open BVH file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_bvh(ss.str());
}

std::string write_bvh(const JointHierarchy& h, const MotionClip& m) {
  if (m.representation != Representation::Euler) {
    throw InvalidInputError("BVH export requires an Euler-angle clip");
  }
  h.validate();
  if (m.frames.cols() != 3 * h.size()) {
    throw InvalidInputError("clip width " + std::to_string(m.frames.cols()) +
                            " does not match hierarchy of " + std::to_string(h.size()) + " joints");
  }
  if (!(m.fps > 0.0)) throw InvalidInputError("clip fps must be positive");
  if (m.root_translation.size() > 0 &&
      (m.root_translation.rows() != m.frame_count() || m.root_translation.cols() != 3)) {
    throw InvalidInputError("root translation must be frames x 3");
  }

  std::ostringstream os;
  os << "HIERARCHY\n";
  write_joint(os, h, h.children(), 0, 0);
  os << "MOTION\n";
  os << "Frames: " << m.frame_count() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", 1.0 / m.fps);
  os << "Frame Time: " << buf << "\n";
  for (int f = 0; f < m.frame_count(); ++f) {
    bool first = true;
    for (int j = 0; j < h.size(); ++j) {
      const Joint& joint = h.joints[j];
      int rot = 0;
      for (Channel c : joint.channels) {
        double v = 0.0;
        if (c >= Channel::Xrotation) {
          v = m.frames(f, 3 * j + rot++);
        } else if (j != 0) {
          v = joint.offset[static_cast<int>(c)];
        } else if (m.root_translation.size() > 0) {
          v = m.root_translation(f, static_cast<int>(c));
        }
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        if (!first) os << ' ';
        os << buf;
        first = false;
      }
    }
    os << "\n";
  }
  return os.str();
}

void write_bvh_file(const std::string& path, const JointHierarchy& h, const MotionClip& m) {
  const std::string text = write_bvh(h, m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write BVH file: " + path);
  out << text;
}

}  // namespace gesturegan
