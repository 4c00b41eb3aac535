#include <cmath>

#include "gesturegan/errors.hpp"
#include "gesturegan/model.hpp"

namespace gesturegan {

void ModelDims::validate() const {
  if (window < 1 || window % 2 == 0) throw ShapeError("generator window must be odd and positive");
  if (noise_dim < 0 || pose_dim < 1 || prev_poses < 1) throw ShapeError("invalid pose or noise width");
  if (input_dim() < 1) throw ShapeError("generator input is empty");
  if (gru_layers < 1 || gru_hidden < 1) throw ShapeError("invalid GRU shape");
  if (dropout < 0.0 || dropout >= 1.0) throw ShapeError("dropout must be in [0, 1)");
  const auto lengths = conv_temporal_lengths(chunk);
  if (lengths.back() != 1) {
    throw ChunkSizeError("chunk of " + std::to_string(chunk) +
                         " frames does not reduce to a single step in the convolution stack");
  }
}

Generator::Generator(const ModelDims& d) : dims(d) {
  dims.validate();
  if (dims.use_gru) {
    int in = dims.input_dim();
    for (int l = 0; l < dims.gru_layers; ++l) {
      gru.emplace_back(in, dims.gru_hidden);
      in = 2 * dims.gru_hidden;
    }
  } else {
    flat_projection = Linear(dims.window * dims.input_dim(), dims.flat_dim());
  }
  reduce = Linear(dims.flat_dim(), dims.reduce_dim);
  if (dims.use_film) {
    film_gamma = Linear(dims.context_dim(), dims.reduce_dim);
    film_beta = Linear(dims.context_dim(), dims.reduce_dim);
  }
  hidden = Linear(dims.reduce_dim, dims.hidden_dim);
  output = Linear(dims.hidden_dim, dims.pose_dim);
}

void Generator::init(Rng& rng) {
  for (BiGru& g : gru) g.init(rng);
  if (!dims.use_gru) flat_projection.init(rng);
  reduce.init(rng);
  if (dims.use_film) {
    film_gamma.init(rng);
    film_beta.init(rng);
  }
  hidden.init(rng);
  output.init(rng);
}

Matrix Generator::forward(const std::vector<Matrix>& window, const Matrix& context, Rng* dropout_rng,
                          GeneratorCache* cache) const {
  if (static_cast<int>(window.size()) != dims.window) {
    throw InvalidInputError("generator expects a window of " + std::to_string(dims.window) + " frames");
  }
  const Eigen::Index B = window[0].rows();
  for (const Matrix& w : window) {
    if (w.cols() != dims.input_dim() || w.rows() != B) {
      throw InvalidInputError("generator window rows must be " + std::to_string(dims.input_dim()) + " wide");
    }
  }
  if (dims.use_film && (context.cols() != dims.context_dim() || context.rows() != B)) {
    throw InvalidInputError("generator context must be " + std::to_string(dims.context_dim()) + " wide");
  }

  GeneratorCache local;
  GeneratorCache& c = cache ? *cache : local;
  c.window = window;
  c.context = context;

  if (dims.use_gru) {
    c.gru.assign(gru.size(), {});
    c.gru_outputs.assign(gru.size(), {});
    c.dropout_masks.clear();
    std::vector<Matrix> xs = window;
    for (std::size_t l = 0; l < gru.size(); ++l) {
      if (l > 0 && dropout_rng && dims.dropout > 0.0) {
        // Inverted dropout on the inputs of every layer after the first.
        const double keep = 1.0 - dims.dropout;
        for (Matrix& x : xs) {
          Matrix mask(x.rows(), x.cols());
          for (Eigen::Index j = 0; j < mask.cols(); ++j) {
            for (Eigen::Index i = 0; i < mask.rows(); ++i) {
              mask(i, j) = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
            }
          }
          x = x.cwiseProduct(mask);
          c.dropout_masks.push_back(std::move(mask));
        }
      }
      xs = gru[l].forward(xs, &c.gru[l]);
      c.gru_outputs[l] = xs;
    }
    const int H2 = 2 * dims.gru_hidden;
    c.flat.resize(B, dims.flat_dim());
    for (int t = 0; t < dims.window; ++t) c.flat.middleCols(t * H2, H2) = xs[t];
  } else {
    Matrix stacked(B, dims.window * dims.input_dim());
    for (int t = 0; t < dims.window; ++t) stacked.middleCols(t * dims.input_dim(), dims.input_dim()) = window[t];
    c.gru_outputs.assign(1, {stacked});
    c.flat = flat_projection.forward(stacked);
  }

  c.reduced = reduce.forward(c.flat).array().tanh().matrix();
  if (dims.use_film) {
    c.gamma = film_gamma.forward(context).array() + 1.0;
    c.beta = film_beta.forward(context);
    c.modulated = c.gamma.cwiseProduct(c.reduced) + c.beta;
  } else {
    c.modulated = c.reduced;
  }
  c.hidden = hidden.forward(c.modulated);
  c.output = output.forward(c.hidden).array().tanh().matrix();
  return c.output;
}

void Generator::backward(const GeneratorCache& c, const Matrix& d_output) {
  const Matrix d_out_pre = d_output.cwiseProduct((1.0 - c.output.array().square()).matrix());
  const Matrix d_hidden = output.backward(c.hidden, d_out_pre);
  const Matrix d_mod = hidden.backward(c.modulated, d_hidden);
  Matrix d_reduced;
  if (dims.use_film) {
    d_reduced = d_mod.cwiseProduct(c.gamma);
    film_gamma.backward(c.context, d_mod.cwiseProduct(c.reduced));
    film_beta.backward(c.context, d_mod);
  } else {
    d_reduced = d_mod;
  }
  const Matrix d_reduce_pre = d_reduced.cwiseProduct((1.0 - c.reduced.array().square()).matrix());
  const Matrix d_flat = reduce.backward(c.flat, d_reduce_pre);

  if (!dims.use_gru) {
    flat_projection.backward(c.gru_outputs[0][0], d_flat);
    return;
  }
  const int H2 = 2 * dims.gru_hidden;
  std::vector<Matrix> d_xs(dims.window);
  for (int t = 0; t < dims.window; ++t) d_xs[t] = d_flat.middleCols(t * H2, H2);
  for (int l = static_cast<int>(gru.size()) - 1; l >= 0; --l) {
    d_xs = gru[l].backward(c.gru[l], d_xs);
    if (l > 0 && !c.dropout_masks.empty()) {
      for (int t = 0; t < dims.window; ++t) {
        d_xs[t] = d_xs[t].cwiseProduct(c.dropout_masks[(l - 1) * dims.window + t]);
      }
    }
  }
}

void Generator::visit(const ParameterVisitor& f) {
  for (std::size_t l = 0; l < gru.size(); ++l) gru[l].visit("generator.gru" + std::to_string(l), f);
  if (!dims.use_gru) flat_projection.visit("generator.flat_projection", f);
  reduce.visit("generator.reduce", f);
  if (dims.use_film) {
    film_gamma.visit("generator.film_gamma", f);
    film_beta.visit("generator.film_beta", f);
  }
  hidden.visit("generator.hidden", f);
  output.visit("generator.output", f);
}

void Generator::visit(const ConstParameterVisitor& f) const {
  for (std::size_t l = 0; l < gru.size(); ++l) gru[l].visit("generator.gru" + std::to_string(l), f);
  if (!dims.use_gru) flat_projection.visit("generator.flat_projection", f);
  reduce.visit("generator.reduce", f);
  if (dims.use_film) {
    film_gamma.visit("generator.film_gamma", f);
    film_beta.visit("generator.film_beta", f);
  }
  hidden.visit("generator.hidden", f);
  output.visit("generator.output", f);
}

std::vector<Parameter*> Generator::parameters() {
  std::vector<Parameter*> out;
  visit(ParameterVisitor([&](const std::string&, Parameter& p) { out.push_back(&p); }));
  return out;
}

void Generator::zero_grad() {
  visit(ParameterVisitor([](const std::string&, Parameter& p) { p.zero_grad(); }));
}

}  // namespace gesturegan
