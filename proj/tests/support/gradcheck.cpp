#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "synthetic.hpp"

namespace gesturegan::gradcheck {
namespace {

constexpr double kStep = 1e-5;
constexpr int kBatch = 2;

double relative(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-7});
}

struct Problem {
  std::vector<Matrix> window;
  Matrix context;
  Matrix target;
  DiscriminatorInput real;
};

Problem make_problem(const ModelDims& d, std::uint64_t seed) {
  Problem p;
  const int rows = kBatch * d.chunk;
  for (int w = 0; w < d.window; ++w) p.window.push_back(testdata::random_matrix(rows, d.input_dim(), seed + w));
  p.context = testdata::random_matrix(rows, d.context_dim(), seed + 100, -0.9, 0.9);
  p.target = testdata::random_matrix(rows, d.pose_dim, seed + 200, -0.9, 0.9);
  p.real.batch = kBatch;
  p.real.gestures = testdata::random_matrix(rows, d.pose_dim, seed + 300, -0.9, 0.9);
  p.real.audio = testdata::random_matrix(rows, d.audio_dim, seed + 400);
  p.real.text = testdata::random_matrix(rows, d.text_dim, seed + 500);
  return p;
}

template <class Net>
std::vector<std::pair<std::string, Parameter*>> named(Net& net) {
  std::vector<std::pair<std::string, Parameter*>> out;
  net.visit([&](const std::string& n, Parameter& p) { out.emplace_back(n, &p); });
  return out;
}

template <class Net, class Loss>
std::vector<TensorCheck> compare(Net& net, Loss&& loss, std::uint64_t seed, int samples) {
  std::vector<TensorCheck> out;
  Rng pick(seed);
  for (auto& [name, p] : named(net)) {
    TensorCheck c{name, 0.0, 0};
    const Eigen::Index n = p->value.size();
    const int count = static_cast<int>(std::min<Eigen::Index>(n, samples));
    for (int s = 0; s < count; ++s) {
      const Eigen::Index idx = n <= samples ? s : static_cast<Eigen::Index>(pick.next() % n);
      double& v = p->value.data()[idx];
      const double saved = v;
      v = saved + kStep;
      const double up = loss();
      v = saved - kStep;
      const double down = loss();
      v = saved;
      const double numeric = (up - down) / (2 * kStep);
      const double rel = relative(p->grad.data()[idx], numeric);
      if (rel >= c.worst_relative) {
        c.worst_relative = rel;
        c.analytic = p->grad.data()[idx];
        c.numeric = numeric;
      }
      ++c.entries;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

ModelDims tiny_dims() {
  ModelDims d;
  d.text_dim = 6;
  d.audio_dim = 4;
  d.noise_dim = 3;
  d.pose_dim = 5;
  d.window = 5;
  d.prev_poses = 2;
  d.gru_hidden = 4;
  d.reduce_dim = 7;
  d.hidden_dim = 6;
  d.stream_hidden = 3;
  d.stream_out = 4;
  d.conv_channels = {5, 6, 6, 7, 7, 8};
  d.fc1 = 6;
  d.fc2 = 5;
  d.chunk = 40;
  return d;
}

std::vector<TensorCheck> generator(const ModelDims& dims, const TrainConfig& cfg, std::uint64_t seed, bool dropout,
                                   int samples_per_tensor) {
  GestureModel m = init_params(seed, dims);
  const Problem p = make_problem(dims, seed + 1);
  auto run = [&](GeneratorCache* gc, DiscriminatorCache* dc, Matrix* fake_out, Vector* scores_out) {
    Rng drop(seed + 7);
    const Matrix fake = m.generator.forward(p.window, p.context, dropout ? &drop : nullptr, gc);
    DiscriminatorInput in = p.real;
    in.gestures = fake;
    const Vector scores = m.discriminator.forward(in, dc);
    if (fake_out) *fake_out = fake;
    if (scores_out) *scores_out = scores;
    return generator_loss(fake, p.target, scores, cfg, dims.chunk).total;
  };
  GeneratorCache gc;
  DiscriminatorCache dc;
  Matrix fake;
  Vector scores;
  run(&gc, &dc, &fake, &scores);
  m.generator.zero_grad();
  m.discriminator.zero_grad();
  Matrix d_fake = generator_reconstruction_grad(fake, p.target, cfg, dims.chunk);
  d_fake += m.discriminator.backward(dc, Vector::Constant(kBatch, -cfg.lambda / kBatch));
  m.generator.backward(gc, d_fake);
  return compare(m.generator, [&] { return run(nullptr, nullptr, nullptr, nullptr); }, seed + 3,
                 samples_per_tensor);
}

std::vector<TensorCheck> discriminator(const ModelDims& dims, std::uint64_t seed, int samples_per_tensor) {
  GestureModel m = init_params(seed, dims);
  const Problem p = make_problem(dims, seed + 1);
  DiscriminatorInput fake = p.real;
  fake.gestures = p.target;
  auto loss = [&](DiscriminatorCache* fc, DiscriminatorCache* rc) {
    return discriminator_loss(m.discriminator.forward(fake, fc), m.discriminator.forward(p.real, rc));
  };
  DiscriminatorCache fc, rc;
  loss(&fc, &rc);
  m.discriminator.zero_grad();
  m.discriminator.backward(fc, Vector::Constant(kBatch, 1.0 / kBatch));
  m.discriminator.backward(rc, Vector::Constant(kBatch, -1.0 / kBatch));
  return compare(m.discriminator, [&] { return loss(nullptr, nullptr); }, seed + 5, samples_per_tensor);
}

TensorCheck discriminator_input(const ModelDims& dims, std::uint64_t seed, int samples) {
  GestureModel m = init_params(seed, dims);
  const Problem p = make_problem(dims, seed + 1);
  DiscriminatorInput fake = p.real;
  fake.gestures = p.target;
  DiscriminatorCache fc;
  m.discriminator.forward(fake, &fc);
  const Matrix analytic = m.discriminator.backward(fc, Vector::Constant(kBatch, 1.0 / kBatch));
  TensorCheck c{"gestures", 0.0, 0};
  Rng pick(seed + 9);
  for (int s = 0; s < samples; ++s) {
    const Eigen::Index idx = static_cast<Eigen::Index>(pick.next() % fake.gestures.size());
    double& v = fake.gestures.data()[idx];
    const double saved = v;
    v = saved + kStep;
    const double up = m.discriminator.forward(fake, nullptr).mean();
    v = saved - kStep;
    const double down = m.discriminator.forward(fake, nullptr).mean();
    v = saved;
    c.worst_relative = std::max(c.worst_relative, relative(analytic.data()[idx], (up - down) / (2 * kStep)));
    ++c.entries;
  }
  return c;
}

double worst(const std::vector<TensorCheck>& checks) {
  double w = 0.0;
  for (const auto& c : checks) w = std::max(w, c.worst_relative);
  return w;
}

}  // namespace gesturegan::gradcheck
