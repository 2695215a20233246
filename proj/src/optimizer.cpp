#include "hrl/optimizer.hpp"

#include <cmath>

#include "hrl/error.hpp"

namespace hrl {

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind optimizer_from_string(std::string_view name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ValidationError("unknown optimizer '" + std::string(name) + "'");
}

void Sgd::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) { params -= lr_ * grad; }

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (m_.size() != params.size()) {
    m_ = Eigen::VectorXd::Zero(params.size());
    v_ = Eigen::VectorXd::Zero(params.size());
    t_ = 0;
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("learning rate must be >= 0");
  if (kind == OptimizerKind::kSgd) return std::make_unique<Sgd>(lr);
  return std::make_unique<Adam>(lr);
}

void clip_grad_norm(Eigen::VectorXd& grad, double max_norm) {
  if (max_norm <= 0.0) return;
  const double n = grad.norm();
  if (n > max_norm) grad *= max_norm / n;
}

}  // namespace hrl
