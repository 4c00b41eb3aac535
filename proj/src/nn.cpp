#include "gesturegan/nn.hpp"

#include <cmath>

namespace gesturegan {
namespace {

Matrix stack_rows(const std::vector<Matrix>& parts) {
  if (parts.empty()) return {};
  const Eigen::Index rows = parts[0].rows();
  Matrix out(rows * static_cast<Eigen::Index>(parts.size()), parts[0].cols());
  for (std::size_t i = 0; i < parts.size(); ++i) out.middleRows(rows * static_cast<Eigen::Index>(i), rows) = parts[i];
  return out;
}

Matrix add_bias(Matrix m, const Parameter& bias) {
  m.rowwise() += bias.value.col(0).transpose();
  return m;
}

Matrix sigmoid_of(const Matrix& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace

void init_uniform(Parameter& p, int fan_in, Rng& rng) {
  const double bound = std::sqrt(1.0 / fan_in);
  for (Eigen::Index j = 0; j < p.value.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.value.rows(); ++i) p.value(i, j) = rng.uniform(-bound, bound);
  }
  round_to_storage(p.value);
  p.zero_grad();
}

void round_to_storage(Matrix& m) {
  m = m.cast<float>().cast<double>();
}

void round_to_storage(Vector& v) { v = v.cast<float>().cast<double>(); }

Matrix leaky_relu(const Matrix& x, double slope) {
  return x.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

Matrix leaky_relu_backward(const Matrix& x, const Matrix& dy, double slope) {
  return dy.binaryExpr(x, [slope](double g, double v) { return v > 0.0 ? g : slope * g; });
}

Matrix sigmoid(const Matrix& x) { return sigmoid_of(x); }

// Linear

Linear::Linear(int in, int out) {
  weight.reset(out, in);
  bias.reset(out, 1);
}

void Linear::init(Rng& rng) {
  init_uniform(weight, in(), rng);
  bias.value.setZero();
  bias.zero_grad();
}

Matrix Linear::forward(const Matrix& x) const {
  return add_bias(x * weight.value.transpose(), bias);
}

Matrix Linear::backward(const Matrix& x, const Matrix& dy) {
  weight.grad.noalias() += dy.transpose() * x;
  bias.grad += dy.colwise().sum().transpose();
  return dy * weight.value;
}

void Linear::visit(const std::string& prefix, const ParameterVisitor& f) {
  f(prefix + ".weight", weight);
  f(prefix + ".bias", bias);
}

void Linear::visit(const std::string& prefix, const ConstParameterVisitor& f) const {
  f(prefix + ".weight", weight);
  f(prefix + ".bias", bias);
}

// GruCell

GruCell::GruCell(int in, int hidden) {
  w_ih.reset(3 * hidden, in);
  w_hh.reset(3 * hidden, hidden);
  b_ih.reset(3 * hidden, 1);
  b_hh.reset(3 * hidden, 1);
}

void GruCell::init(Rng& rng) {
  init_uniform(w_ih, static_cast<int>(w_ih.value.cols()), rng);
  init_uniform(w_hh, hidden(), rng);
  b_ih.value.setZero();
  b_hh.value.setZero();
  b_ih.zero_grad();
  b_hh.zero_grad();
}

Matrix GruCell::step(const Matrix& gi, const Matrix& h, Step* cache) const {
  const int H = hidden();
  const Matrix gh = add_bias(h * w_hh.value.transpose(), b_hh);
  const Matrix r = sigmoid_of(gi.leftCols(H) + gh.leftCols(H));
  const Matrix z = sigmoid_of(gi.middleCols(H, H) + gh.middleCols(H, H));
  const Matrix hn = gh.rightCols(H);
  const Matrix n = (gi.rightCols(H).array() + r.array() * hn.array()).tanh().matrix();
  Matrix h_next = ((1.0 - z.array()) * n.array() + z.array() * h.array()).matrix();
  if (cache) {
    cache->h_prev = h;
    cache->r = r;
    cache->z = z;
    cache->n = n;
    cache->hn = hn;
  }
  return h_next;
}

Matrix GruCell::step_backward(const Step& c, const Matrix& dh, Matrix& d_gi) {
  const int H = hidden();
  const auto z = c.z.array();
  const auto n = c.n.array();
  const auto r = c.r.array();
  const Eigen::ArrayXXd dn_pre = dh.array() * (1.0 - z) * (1.0 - n * n);
  const Eigen::ArrayXXd dz_pre = dh.array() * (c.h_prev.array() - n) * z * (1.0 - z);
  const Eigen::ArrayXXd dr_pre = dn_pre * c.hn.array() * r * (1.0 - r);

  d_gi.resize(dh.rows(), 3 * H);
  d_gi.leftCols(H) = dr_pre.matrix();
  d_gi.middleCols(H, H) = dz_pre.matrix();
  d_gi.rightCols(H) = dn_pre.matrix();

  Matrix d_gh(dh.rows(), 3 * H);
  d_gh.leftCols(H) = dr_pre.matrix();
  d_gh.middleCols(H, H) = dz_pre.matrix();
  d_gh.rightCols(H) = (dn_pre * r).matrix();

  w_hh.grad.noalias() += d_gh.transpose() * c.h_prev;
  b_hh.grad += d_gh.colwise().sum().transpose();
  Matrix dh_prev = (dh.array() * z).matrix();
  dh_prev.noalias() += d_gh * w_hh.value;
  return dh_prev;
}

void GruCell::visit(const std::string& prefix, const ParameterVisitor& f) {
  f(prefix + ".weight_ih", w_ih);
  f(prefix + ".weight_hh", w_hh);
  f(prefix + ".bias_ih", b_ih);
  f(prefix + ".bias_hh", b_hh);
}

void GruCell::visit(const std::string& prefix, const ConstParameterVisitor& f) const {
  f(prefix + ".weight_ih", w_ih);
  f(prefix + ".weight_hh", w_hh);
  f(prefix + ".bias_ih", b_ih);
  f(prefix + ".bias_hh", b_hh);
}

// BiGru

void BiGru::init(Rng& rng) {
  forward_cell.init(rng);
  backward_cell.init(rng);
}

std::vector<Matrix> BiGru::forward(const std::vector<Matrix>& xs, Cache* cache) const {
  const int T = static_cast<int>(xs.size());
  const Eigen::Index B = xs.empty() ? 0 : xs[0].rows();
  const int H = forward_cell.hidden();
  const Matrix x_all = stack_rows(xs);
  const Matrix gi_f = add_bias(x_all * forward_cell.w_ih.value.transpose(), forward_cell.b_ih);
  const Matrix gi_b = add_bias(x_all * backward_cell.w_ih.value.transpose(), backward_cell.b_ih);

  std::vector<Matrix> out(T, Matrix(B, 2 * H));
  if (cache) {
    cache->inputs = xs;
    cache->forward_steps.assign(T, {});
    cache->backward_steps.assign(T, {});
  }
  Matrix h = Matrix::Zero(B, H);
  for (int t = 0; t < T; ++t) {
    h = forward_cell.step(gi_f.middleRows(t * B, B), h, cache ? &cache->forward_steps[t] : nullptr);
    out[t].leftCols(H) = h;
  }
  h.setZero();
  for (int t = T - 1; t >= 0; --t) {
    h = backward_cell.step(gi_b.middleRows(t * B, B), h, cache ? &cache->backward_steps[t] : nullptr);
    out[t].rightCols(H) = h;
  }
  return out;
}

std::vector<Matrix> BiGru::backward(const Cache& cache, const std::vector<Matrix>& d_out) {
  const int T = static_cast<int>(d_out.size());
  const Eigen::Index B = d_out.empty() ? 0 : d_out[0].rows();
  const int H = forward_cell.hidden();
  Matrix d_gi_f(T * B, 3 * H);
  Matrix d_gi_b(T * B, 3 * H);
  Matrix d_gi;

  Matrix dh = Matrix::Zero(B, H);
  for (int t = T - 1; t >= 0; --t) {
    dh += d_out[t].leftCols(H);
    dh = forward_cell.step_backward(cache.forward_steps[t], dh, d_gi);
    d_gi_f.middleRows(t * B, B) = d_gi;
  }
  dh.setZero();
  for (int t = 0; t < T; ++t) {
    dh += d_out[t].rightCols(H);
    dh = backward_cell.step_backward(cache.backward_steps[t], dh, d_gi);
    d_gi_b.middleRows(t * B, B) = d_gi;
  }

  const Matrix x_all = stack_rows(cache.inputs);
  forward_cell.w_ih.grad.noalias() += d_gi_f.transpose() * x_all;
  forward_cell.b_ih.grad += d_gi_f.colwise().sum().transpose();
  backward_cell.w_ih.grad.noalias() += d_gi_b.transpose() * x_all;
  backward_cell.b_ih.grad += d_gi_b.colwise().sum().transpose();
  Matrix dx_all = d_gi_f * forward_cell.w_ih.value;
  dx_all.noalias() += d_gi_b * backward_cell.w_ih.value;

  std::vector<Matrix> dxs(T);
  for (int t = 0; t < T; ++t) dxs[t] = dx_all.middleRows(t * B, B);
  return dxs;
}

void BiGru::visit(const std::string& prefix, const ParameterVisitor& f) {
  forward_cell.visit(prefix + ".forward", f);
  backward_cell.visit(prefix + ".backward", f);
}

void BiGru::visit(const std::string& prefix, const ConstParameterVisitor& f) const {
  forward_cell.visit(prefix + ".forward", f);
  backward_cell.visit(prefix + ".backward", f);
}

// Conv1d

Conv1d::Conv1d(int in, int out, int k, int s) : kernel(k), stride(s) {
  weight.reset(out, k * in);
  bias.reset(out, 1);
}

void Conv1d::init(Rng& rng) {
  init_uniform(weight, static_cast<int>(weight.value.cols()), rng);
  bias.value.setZero();
  bias.zero_grad();
}

Matrix Conv1d::forward(const Matrix& x, Matrix* cols_out) const {
  const int c_in = static_cast<int>(x.cols());
  const int l_out = output_length(static_cast<int>(x.rows()));
  Matrix cols(l_out, kernel * c_in);
  for (int t = 0; t < l_out; ++t) {
    for (int k = 0; k < kernel; ++k) cols.block(t, k * c_in, 1, c_in) = x.row(t * stride + k);
  }
  Matrix y = add_bias(cols * weight.value.transpose(), bias);
  if (cols_out) *cols_out = std::move(cols);
  return y;
}

Matrix Conv1d::backward(const Matrix& cols, int input_length, const Matrix& dy) {
  weight.grad.noalias() += dy.transpose() * cols;
  bias.grad += dy.colwise().sum().transpose();
  const Matrix d_cols = dy * weight.value;
  const int c_in = in();
  Matrix dx = Matrix::Zero(input_length, c_in);
  for (Eigen::Index t = 0; t < dy.rows(); ++t) {
    for (int k = 0; k < kernel; ++k) dx.row(t * stride + k) += d_cols.block(t, k * c_in, 1, c_in);
  }
  return dx;
}

void Conv1d::visit(const std::string& prefix, const ParameterVisitor& f) {
  f(prefix + ".weight", weight);
  f(prefix + ".bias", bias);
}

void Conv1d::visit(const std::string& prefix, const ConstParameterVisitor& f) const {
  f(prefix + ".weight", weight);
  f(prefix + ".bias", bias);
}

// LayerNorm

LayerNorm::LayerNorm(int channels) {
  gain.reset(channels, 1);
  bias.reset(channels, 1);
  init();
}

void LayerNorm::init() {
  gain.value.setOnes();
  bias.value.setZero();
  gain.zero_grad();
  bias.zero_grad();
}

Matrix LayerNorm::forward(const Matrix& x, Cache* cache) const {
  const Vector mean = x.rowwise().mean();
  Matrix centred = x.colwise() - mean;
  const Vector var = centred.array().square().rowwise().mean();
  const Vector inv_std = (var.array() + eps).rsqrt();
  Matrix normalized = centred.array().colwise() * inv_std.array();
  Matrix y = normalized.array().rowwise() * gain.value.col(0).transpose().array();
  y.rowwise() += bias.value.col(0).transpose();
  if (cache) {
    cache->normalized = std::move(normalized);
    cache->inv_std = inv_std;
  }
  return y;
}

Matrix LayerNorm::backward(const Cache& c, const Matrix& dy) {
  gain.grad += (dy.array() * c.normalized.array()).colwise().sum().transpose().matrix();
  bias.grad += dy.colwise().sum().transpose();
  const Matrix dxhat = dy.array().rowwise() * gain.value.col(0).transpose().array();
  const Vector mean_d = dxhat.rowwise().mean();
  const Vector mean_dx = (dxhat.array() * c.normalized.array()).rowwise().mean();
  Matrix dx = dxhat.colwise() - mean_d;
  dx -= (c.normalized.array().colwise() * mean_dx.array()).matrix();
  return dx.array().colwise() * c.inv_std.array();
}

void LayerNorm::visit(const std::string& prefix, const ParameterVisitor& f) {
  f(prefix + ".gain", gain);
  f(prefix + ".bias", bias);
}

void LayerNorm::visit(const std::string& prefix, const ConstParameterVisitor& f) const {
  f(prefix + ".gain", gain);
  f(prefix + ".bias", bias);
}

// Adam

void adam_update(const std::vector<Parameter*>& params, AdamState& state, const AdamConfig& cfg) {
  if (state.first_moment.empty()) {
    for (const Parameter* p : params) {
      state.first_moment.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      state.second_moment.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * p.grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * p.grad.cwiseAbs2();
    round_to_storage(m);
    round_to_storage(v);
    p.value.array() -= cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
    round_to_storage(p.value);
  }
}

}  // namespace gesturegan
