#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace hrl {

enum class OptimizerKind { kSgd, kAdam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(std::string_view name);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  // params -= update(grad). grad is a descent direction's negative (a loss
  // gradient).
  virtual void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) = 0;
  virtual double learning_rate() const = 0;
};

class Sgd final : public Optimizer {
 public:
  explicit Sgd(double lr) : lr_(lr) {}
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) override;
  double learning_rate() const override { return lr_; }

 private:
  double lr_;
};

class Adam final : public Optimizer {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) override;
  double learning_rate() const override { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  Eigen::VectorXd m_, v_;
  long t_ = 0;
};

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, double lr);

// Scales grad in place so its L2 norm is at most max_norm (no-op when
// max_norm <= 0).
void clip_grad_norm(Eigen::VectorXd& grad, double max_norm);

}  // namespace hrl
