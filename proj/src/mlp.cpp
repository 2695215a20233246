#include "hrl/mlp.hpp"

#include <cmath>

#include "hrl/error.hpp"

namespace hrl {

Eigen::Index MlpLayout::param_count() const {
  Eigen::Index n = 0;
  for (int l = 0; l < layer_count(); ++l)
    n += static_cast<Eigen::Index>(sizes[l]) * sizes[l + 1] + sizes[l + 1];
  return n;
}

void MlpLayout::validate() const {
  if (sizes.size() < 2) throw ValidationError("an MLP needs at least input and output sizes");
  for (int s : sizes)
    if (s < 1) throw ValidationError("MLP layer sizes must be positive");
}

Mlp::Mlp(MlpLayout layout) : layout_(std::move(layout)) {
  layout_.validate();
  params_ = Eigen::VectorXd::Zero(layout_.param_count());
  Eigen::Index off = 0;
  for (int l = 0; l < layout_.layer_count(); ++l) {
    offsets_.push_back(off);
    off += static_cast<Eigen::Index>(layout_.sizes[l]) * layout_.sizes[l + 1] + layout_.sizes[l + 1];
  }
}

void Mlp::init(Rng& rng) {
  params_.setZero();
  for (int l = 0; l < layout_.layer_count(); ++l) {
    const int in = layout_.sizes[l];
    const int out = layout_.sizes[l + 1];
    const double a = std::sqrt(6.0 / (in + out));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(in) * out; ++i)
      params_[offsets_[l] + i] = rng.uniform(-a, a);
  }
}

void Mlp::set_params(const Eigen::VectorXd& p) {
  if (p.size() != params_.size()) throw ContractViolation("parameter vector has wrong size");
  params_ = p;
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(int l) const {
  return {params_.data() + offsets_[l], layout_.sizes[l + 1], layout_.sizes[l]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(int l) const {
  const Eigen::Index n = static_cast<Eigen::Index>(layout_.sizes[l]) * layout_.sizes[l + 1];
  return {params_.data() + offsets_[l] + n, layout_.sizes[l + 1]};
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, Cache* cache) const {
  if (input.rows() != input_size()) throw ContractViolation("MLP input has wrong dimension");
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(input);
  }
  Eigen::MatrixXd a = input;
  const int layers = layout_.layer_count();
  for (int l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = weight(l) * a;
    z.colwise() += bias(l);
    if (l + 1 < layers) z = z.array().tanh().matrix();
    a = std::move(z);
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

Eigen::VectorXd Mlp::backward(const Cache& cache, const Eigen::MatrixXd& upstream,
                              Eigen::MatrixXd* input_grad) const {
  const int layers = layout_.layer_count();
  if (static_cast<int>(cache.activations.size()) != layers + 1)
    throw ContractViolation("backward called without a matching forward cache");
  if (upstream.rows() != output_size() || upstream.cols() != cache.activations[0].cols())
    throw ContractViolation("upstream gradient has wrong shape");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
  Eigen::MatrixXd delta = upstream;
  for (int l = layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd& a_in = cache.activations[l];
    const int in = layout_.sizes[l];
    const int out = layout_.sizes[l + 1];
    Eigen::Map<Eigen::MatrixXd> dw(grad.data() + offsets_[l], out, in);
    Eigen::Map<Eigen::VectorXd> db(grad.data() + offsets_[l] + static_cast<Eigen::Index>(in) * out,
                                   out);
    dw.noalias() = delta * a_in.transpose();
    db = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = weight(l).transpose() * delta;
      delta = back.array() * (1.0 - a_in.array().square());
    } else if (input_grad) {
      *input_grad = weight(0).transpose() * delta;
    }
  }
  return grad;
}

}  // namespace hrl
