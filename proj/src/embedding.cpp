#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "gesturegan/errors.hpp"
#include "gesturegan/random.hpp"
#include "gesturegan/text.hpp"

namespace gesturegan {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  return out + "'";
}

}  // namespace

Vector StubEmbeddingProvider::embed_word(std::string_view word) const {
  Rng rng(mix_seed(seed_, fnv1a(word)));
  Vector v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = rng.uniform(-1.0, 1.0);
  return v;
}

Matrix StubEmbeddingProvider::embed(std::span<const std::string> sentence) {
  Matrix out(static_cast<Eigen::Index>(sentence.size()), dim_);
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = embed_word(sentence[i]).transpose();
  }
  return out;
}

Matrix SubprocessEmbeddingProvider::embed(std::span<const std::string> sentence) {
  static std::atomic<int> counter{0};
  namespace fs = std::filesystem;
  const std::string stem = "gesturegan_embed_" + std::to_string(::getpid()) + "_" + std::to_string(counter++);
  const fs::path in_path = fs::temp_directory_path() / (stem + ".txt");
  const fs::path out_path = fs::temp_directory_path() / (stem + ".ggf");
  {
    std::ofstream in(in_path);
    if (!in) throw ProviderError("cannot create embedding request file");
    for (const std::string& w : sentence) in << w << "\n";
  }
  const std::string cmd = command_ + " < " + shell_quote(in_path.string()) + " > " + shell_quote(out_path.string());
  const int status = std::system(cmd.c_str());
  std::error_code ec;
  fs::remove(in_path, ec);
  if (status != 0) {
    fs::remove(out_path, ec);
    throw ProviderError("embedding command failed with status " + std::to_string(status) + ": " + command_);
  }
  Matrix vecs;
  try {
    vecs = read_ggf1_file(out_path.string());
  } catch (const Error& e) {
    fs::remove(out_path, ec);
    throw ProviderError(std::string("embedding command produced bad output: ") + e.what());
  }
  fs::remove(out_path, ec);
  if (vecs.rows() != static_cast<Eigen::Index>(sentence.size()) || vecs.cols() != dim_) {
    throw ProviderError("embedding command returned " + std::to_string(vecs.rows()) + "x" +
                        std::to_string(vecs.cols()) + ", expected " + std::to_string(sentence.size()) +
                        "x" + std::to_string(dim_));
  }
  return vecs;
}

}  // namespace gesturegan
