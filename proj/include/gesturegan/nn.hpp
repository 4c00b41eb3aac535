#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gesturegan/random.hpp"
#include "gesturegan/types.hpp"

namespace gesturegan {

struct Parameter {
  Matrix value;
  Matrix grad;

  void reset(Eigen::Index rows, Eigen::Index cols) {
    value = Matrix::Zero(rows, cols);
    grad = Matrix::Zero(rows, cols);
  }
  void zero_grad() { grad.setZero(); }
};

using ParameterVisitor = std::function<void(const std::string&, Parameter&)>;
using ConstParameterVisitor = std::function<void(const std::string&, const Parameter&)>;

// Fills value with U(-sqrt(1/fan_in), sqrt(1/fan_in)).
void init_uniform(Parameter& p, int fan_in, Rng& rng);

// Rounds to the nearest float32: parameters and optimizer state live at
// storage precision so checkpoints reproduce them exactly.
void round_to_storage(Matrix& m);
void round_to_storage(Vector& v);

Matrix leaky_relu(const Matrix& x, double slope);
Matrix leaky_relu_backward(const Matrix& x, const Matrix& dy, double slope);
Matrix sigmoid(const Matrix& x);

// y = x W^T + b over a batch of rows.
struct Linear {
  Parameter weight;  // out x in
  Parameter bias;    // out x 1

  Linear() = default;
  Linear(int in, int out);
  int in() const { return static_cast<int>(weight.value.cols()); }
  int out() const { return static_cast<int>(weight.value.rows()); }
  void init(Rng& rng);
  Matrix forward(const Matrix& x) const;
  // Accumulates parameter gradients, returns dL/dx.
  Matrix backward(const Matrix& x, const Matrix& dy);
  void visit(const std::string& prefix, const ParameterVisitor& f);
  void visit(const std::string& prefix, const ConstParameterVisitor& f) const;
};

// One direction of a GRU layer (gate order r, z, n):
//   r = s(W_ir x + b_ir + W_hr h + b_hr)
//   z = s(W_iz x + b_iz + W_hz h + b_hz)
//   n = tanh(W_in x + b_in + r * (W_hn h + b_hn))
//   h' = (1 - z) * n + z * h
struct GruCell {
  Parameter w_ih;  // 3H x in
  Parameter w_hh;  // 3H x H
  Parameter b_ih;  // 3H x 1
  Parameter b_hh;  // 3H x 1

  struct Step {
    Matrix h_prev, r, z, n, hn;
  };

  GruCell() = default;
  GruCell(int in, int hidden);
  int hidden() const { return static_cast<int>(w_hh.value.cols()); }
  void init(Rng& rng);
  // gi = x W_ih^T + b_ih, precomputed for the whole sequence.
  Matrix step(const Matrix& gi, const Matrix& h, Step* cache) const;
  // Returns dL/dh_prev and writes dL/d(gi) into d_gi.
  Matrix step_backward(const Step& c, const Matrix& dh, Matrix& d_gi);
  void visit(const std::string& prefix, const ParameterVisitor& f);
  void visit(const std::string& prefix, const ConstParameterVisitor& f) const;
};

// Bidirectional GRU layer; output t is [forward h_t | backward h_t].
struct BiGru {
  GruCell forward_cell;
  GruCell backward_cell;

  struct Cache {
    std::vector<Matrix> inputs;
    std::vector<GruCell::Step> forward_steps;
    std::vector<GruCell::Step> backward_steps;
  };

  BiGru() = default;
  BiGru(int in, int hidden) : forward_cell(in, hidden), backward_cell(in, hidden) {}
  void init(Rng& rng);
  std::vector<Matrix> forward(const std::vector<Matrix>& xs, Cache* cache) const;
  std::vector<Matrix> backward(const Cache& cache, const std::vector<Matrix>& d_out);
  void visit(const std::string& prefix, const ParameterVisitor& f);
  void visit(const std::string& prefix, const ConstParameterVisitor& f) const;
};

// Valid (unpadded) 1D convolution over time. Input and output are L x C
// with time along rows. Weight column index is tap * C_in + c.
struct Conv1d {
  int kernel = 1;
  int stride = 1;
  Parameter weight;  // C_out x (kernel * C_in)
  Parameter bias;    // C_out x 1

  Conv1d() = default;
  Conv1d(int in, int out, int kernel, int stride);
  int in() const { return static_cast<int>(weight.value.cols()) / kernel; }
  int out() const { return static_cast<int>(weight.value.rows()); }
  int output_length(int length) const { return (length - kernel) / stride + 1; }
  void init(Rng& rng);
  // cols receives the unfolded input for backward.
  Matrix forward(const Matrix& x, Matrix* cols) const;
  Matrix backward(const Matrix& cols, int input_length, const Matrix& dy);
  void visit(const std::string& prefix, const ParameterVisitor& f);
  void visit(const std::string& prefix, const ConstParameterVisitor& f) const;
};

// Normalizes each row over its columns, then applies per-column gain and bias.
struct LayerNorm {
  Parameter gain;  // C x 1
  Parameter bias;  // C x 1
  double eps = 1e-5;

  struct Cache {
    Matrix normalized;
    Vector inv_std;
  };

  LayerNorm() = default;
  explicit LayerNorm(int channels);
  void init();
  Matrix forward(const Matrix& x, Cache* cache) const;
  Matrix backward(const Cache& cache, const Matrix& dy);
  void visit(const std::string& prefix, const ParameterVisitor& f);
  void visit(const std::string& prefix, const ConstParameterVisitor& f) const;
};

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam moments for a fixed, ordered list of parameters.
struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::int64_t step = 0;
};

// Applies one Adam update to params (in visit order), initialising state if
// it is empty.
void adam_update(const std::vector<Parameter*>& params, AdamState& state, const AdamConfig& cfg);

}  // namespace gesturegan
