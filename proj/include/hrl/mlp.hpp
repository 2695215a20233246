#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hrl/rng.hpp"

namespace hrl {

// Layer widths from input to output, e.g. {in, 64, 64, out}.
struct MlpLayout {
  std::vector<int> sizes;

  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
  int layer_count() const { return static_cast<int>(sizes.size()) - 1; }
  Eigen::Index param_count() const;
  void validate() const;
  bool operator==(const MlpLayout&) const = default;
};

// Fully connected network with tanh hidden units and a linear output layer.
// Parameters live in one flat vector (per layer: weights column-major, then
// biases) so optimizers and checkpoints can treat them uniformly.
//
// Batches are column-major: an input matrix is input_size x batch.
class Mlp {
 public:
  struct Cache {
    // activations[0] is the input; activations[l] the output of layer l.
    std::vector<Eigen::MatrixXd> activations;
  };

  Mlp() = default;
  explicit Mlp(MlpLayout layout);

  // Xavier-uniform weights, zero biases.
  void init(Rng& rng);

  const MlpLayout& layout() const { return layout_; }
  int input_size() const { return layout_.input_size(); }
  int output_size() const { return layout_.output_size(); }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }
  void set_params(const Eigen::VectorXd& p);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Cache* cache = nullptr) const;

  // Gradient of sum(upstream .* output) with respect to the parameters, given
  // the cache of the matching forward pass. Optionally also returns the
  // gradient with respect to the input.
  Eigen::VectorXd backward(const Cache& cache, const Eigen::MatrixXd& upstream,
                           Eigen::MatrixXd* input_grad = nullptr) const;

  bool all_finite() const { return params_.allFinite(); }

 private:
  Eigen::Map<const Eigen::MatrixXd> weight(int l) const;
  Eigen::Map<const Eigen::VectorXd> bias(int l) const;

  MlpLayout layout_;
  Eigen::VectorXd params_;
  std::vector<Eigen::Index> offsets_;
};

}  // namespace hrl
