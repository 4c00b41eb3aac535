#include "gesturegan/errors.hpp"
#include "gesturegan/model.hpp"

namespace gesturegan {

std::vector<int> conv_temporal_lengths(int chunk) {
  std::vector<int> lengths{chunk};
  for (const auto& [k, s] : kConvGeometry) {
    const int prev = lengths.back();
    lengths.push_back(prev >= k ? (prev - k) / s + 1 : 0);
  }
  return lengths;
}

Discriminator::Discriminator(const ModelDims& d) : dims(d) {
  dims.validate();
  if (dims.use_text) {
    text_in = Linear(dims.text_dim, dims.stream_hidden);
    text_out = Linear(dims.stream_hidden, dims.stream_out);
  }
  if (dims.use_audio) {
    audio_in = Linear(dims.audio_dim, dims.stream_hidden);
    audio_out = Linear(dims.stream_hidden, dims.stream_out);
  }
  pose_in = Linear(dims.pose_dim, dims.stream_hidden);
  pose_out = Linear(dims.stream_hidden, dims.stream_out);
  int in = dims.stream_count() * dims.stream_out;
  for (std::size_t i = 0; i < convs.size(); ++i) {
    convs[i] = Conv1d(in, dims.conv_channels[i], kConvGeometry[i][0], kConvGeometry[i][1]);
    if (i < norms.size()) norms[i] = LayerNorm(dims.conv_channels[i]);
    in = dims.conv_channels[i];
  }
  fc1 = Linear(in, dims.fc1);
  fc2 = Linear(dims.fc1, dims.fc2);
  fc3 = Linear(dims.fc2, 1);
}

void Discriminator::init(Rng& rng) {
  if (dims.use_text) {
    text_in.init(rng);
    text_out.init(rng);
  }
  if (dims.use_audio) {
    audio_in.init(rng);
    audio_out.init(rng);
  }
  pose_in.init(rng);
  pose_out.init(rng);
  for (Conv1d& c : convs) c.init(rng);
  for (LayerNorm& n : norms) n.init();
  fc1.init(rng);
  fc2.init(rng);
  fc3.init(rng);
}

Vector Discriminator::forward(const DiscriminatorInput& in, DiscriminatorCache* cache) const {
  const int L = dims.chunk;
  const int B = in.batch;
  const Eigen::Index rows = static_cast<Eigen::Index>(B) * L;
  auto check = [&](const Matrix& m, int width, const char* what) {
    if (m.rows() != rows) {
      throw ChunkSizeError(std::string(what) + " has " + std::to_string(m.rows()) + " frames, expected " +
                           std::to_string(B) + " chunks of " + std::to_string(L));
    }
    if (m.cols() != width) {
      throw InvalidInputError(std::string(what) + " must be " + std::to_string(width) + " wide");
    }
  };
  if (B < 1) throw InvalidInputError("discriminator batch is empty");
  check(in.gestures, dims.pose_dim, "gesture input");
  if (dims.use_audio) check(in.audio, dims.audio_dim, "audio input");
  if (dims.use_text) check(in.text, dims.text_dim, "text input");

  DiscriminatorCache local;
  DiscriminatorCache& c = cache ? *cache : local;
  c.input = in;
  const double slope = dims.leaky_slope;

  const int S = dims.stream_out;
  Matrix joined(rows, dims.stream_count() * S);
  int col = 0;
  if (dims.use_text) {
    c.text_h = text_in.forward(in.text);
    c.text_a = leaky_relu(c.text_h, slope);
    joined.middleCols(col, S) = text_out.forward(c.text_a);
    col += S;
  }
  if (dims.use_audio) {
    c.audio_h = audio_in.forward(in.audio);
    c.audio_a = leaky_relu(c.audio_h, slope);
    joined.middleCols(col, S) = audio_out.forward(c.audio_a);
    col += S;
  }
  c.pose_h = pose_in.forward(in.gestures);
  c.pose_a = leaky_relu(c.pose_h, slope);
  joined.middleCols(col, S) = pose_out.forward(c.pose_a);

  c.lengths = conv_temporal_lengths(L);
  c.conv_cols.assign(B, std::vector<Matrix>(convs.size()));
  c.conv_pre.assign(B, std::vector<Matrix>(convs.size()));
  c.norm.assign(B, std::vector<LayerNorm::Cache>(norms.size()));
  c.pooled.resize(B, convs.back().out());
  for (int b = 0; b < B; ++b) {
    Matrix x = joined.middleRows(static_cast<Eigen::Index>(b) * L, L);
    for (std::size_t i = 0; i < convs.size(); ++i) {
      c.conv_pre[b][i] = convs[i].forward(x, &c.conv_cols[b][i]);
      if (i < norms.size()) {
        x = norms[i].forward(leaky_relu(c.conv_pre[b][i], slope), &c.norm[b][i]);
      } else {
        x = c.conv_pre[b][i];
      }
    }
    c.pooled.row(b) = x.row(0);
  }

  c.fc1_pre = fc1.forward(c.pooled);
  c.fc1_act = leaky_relu(c.fc1_pre, slope);
  c.fc2_pre = fc2.forward(c.fc1_act);
  c.fc2_act = leaky_relu(c.fc2_pre, slope);
  c.logits = fc3.forward(c.fc2_act);
  c.scores = dims.sigmoid_critic ? Vector(sigmoid(c.logits).col(0)) : Vector(c.logits.col(0));
  return c.scores;
}

Matrix Discriminator::backward(const DiscriminatorCache& c, const Vector& d_scores) {
  const int L = dims.chunk;
  const int B = c.input.batch;
  const double slope = dims.leaky_slope;

  Matrix d_logits = d_scores;
  if (dims.sigmoid_critic) d_logits = d_scores.cwiseProduct((c.scores.array() * (1.0 - c.scores.array())).matrix());
  Matrix d = fc3.backward(c.fc2_act, d_logits);
  d = fc2.backward(c.fc1_act, leaky_relu_backward(c.fc2_pre, d, slope));
  const Matrix d_pooled = fc1.backward(c.pooled, leaky_relu_backward(c.fc1_pre, d, slope));

  const int S = dims.stream_out;
  Matrix d_joined(static_cast<Eigen::Index>(B) * L, dims.stream_count() * S);
  for (int b = 0; b < B; ++b) {
    Matrix dx = d_pooled.row(b);
    for (int i = static_cast<int>(convs.size()) - 1; i >= 0; --i) {
      if (i < static_cast<int>(norms.size())) {
        dx = norms[i].backward(c.norm[b][i], dx);
        dx = leaky_relu_backward(c.conv_pre[b][i], dx, slope);
      }
      dx = convs[i].backward(c.conv_cols[b][i], c.lengths[i], dx);
    }
    d_joined.middleRows(static_cast<Eigen::Index>(b) * L, L) = dx;
  }

  int col = 0;
  if (dims.use_text) {
    const Matrix da = text_out.backward(c.text_a, d_joined.middleCols(col, S));
    text_in.backward(c.input.text, leaky_relu_backward(c.text_h, da, slope));
    col += S;
  }
  if (dims.use_audio) {
    const Matrix da = audio_out.backward(c.audio_a, d_joined.middleCols(col, S));
    audio_in.backward(c.input.audio, leaky_relu_backward(c.audio_h, da, slope));
    col += S;
  }
  const Matrix da = pose_out.backward(c.pose_a, d_joined.middleCols(col, S));
  return pose_in.backward(c.input.gestures, leaky_relu_backward(c.pose_h, da, slope));
}

void Discriminator::visit(const ParameterVisitor& f) {
  if (dims.use_text) {
    text_in.visit("discriminator.text_in", f);
    text_out.visit("discriminator.text_out", f);
  }
  if (dims.use_audio) {
    audio_in.visit("discriminator.audio_in", f);
    audio_out.visit("discriminator.audio_out", f);
  }
  pose_in.visit("discriminator.pose_in", f);
  pose_out.visit("discriminator.pose_out", f);
  for (std::size_t i = 0; i < convs.size(); ++i) {
    convs[i].visit("discriminator.conv" + std::to_string(i), f);
    if (i < norms.size()) norms[i].visit("discriminator.norm" + std::to_string(i), f);
  }
  fc1.visit("discriminator.fc1", f);
  fc2.visit("discriminator.fc2", f);
  fc3.visit("discriminator.fc3", f);
}

void Discriminator::visit(const ConstParameterVisitor& f) const {
  if (dims.use_text) {
    text_in.visit("discriminator.text_in", f);
    text_out.visit("discriminator.text_out", f);
  }
  if (dims.use_audio) {
    audio_in.visit("discriminator.audio_in", f);
    audio_out.visit("discriminator.audio_out", f);
  }
  pose_in.visit("discriminator.pose_in", f);
  pose_out.visit("discriminator.pose_out", f);
  for (std::size_t i = 0; i < convs.size(); ++i) {
    convs[i].visit("discriminator.conv" + std::to_string(i), f);
    if (i < norms.size()) norms[i].visit("discriminator.norm" + std::to_string(i), f);
  }
  fc1.visit("discriminator.fc1", f);
  fc2.visit("discriminator.fc2", f);
  fc3.visit("discriminator.fc3", f);
}

std::vector<Parameter*> Discriminator::parameters() {
  std::vector<Parameter*> out;
  visit(ParameterVisitor([&](const std::string&, Parameter& p) { out.push_back(&p); }));
  return out;
}

void Discriminator::zero_grad() {
  visit(ParameterVisitor([](const std::string&, Parameter& p) { p.zero_grad(); }));
}

void Discriminator::clamp_weights(double c) {
  visit(ParameterVisitor([c](const std::string&, Parameter& p) {
    p.value = p.value.cwiseMax(-c).cwiseMin(c);
    round_to_storage(p.value);
  }));
}

double discriminator_forward(const Discriminator& d, const Matrix& gestures, const Matrix& audio,
                             const Matrix& text) {
  DiscriminatorInput in{gestures, audio, text, 1};
  return d.forward(in, nullptr)[0];
}

}  // namespace gesturegan
