#include <doctest.h>

#include "../support/fd.hpp"
#include "hrl/error.hpp"
#include "hrl/mlp.hpp"
#include "hrl/optimizer.hpp"
#include "hrl/rng.hpp"

using namespace hrl;
using hrl::testing::numeric_gradient;
using hrl::testing::relative_error;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("zero-weight network outputs zeros") {
  Mlp net(MlpLayout{{3, 5, 4}});
  const Eigen::MatrixXd out = net.forward(Eigen::MatrixXd::Constant(3, 2, 0.7));
  CHECK(out.isZero());
}

TEST_CASE("forward is pure") {
  Rng rng(1);
  Mlp net(MlpLayout{{4, 8, 3}});
  net.init(rng);
  const Eigen::MatrixXd x = random_matrix(4, 5, rng);
  CHECK(net.forward(x) == net.forward(x));
}

TEST_CASE("single linear layer: weight gradient is the input outer product") {
  Rng rng(2);
  Mlp net(MlpLayout{{3, 2}});
  net.init(rng);
  Eigen::MatrixXd x(3, 1);
  x << 0.5, -1.0, 2.0;
  Mlp::Cache cache;
  net.forward(x, &cache);
  const Eigen::MatrixXd upstream = Eigen::MatrixXd::Ones(2, 1);
  const Eigen::VectorXd g = net.backward(cache, upstream);
  REQUIRE(g.size() == 8);
  // W is 2x3 column-major: entry (o, i) at i * 2 + o.
  for (int i = 0; i < 3; ++i)
    for (int o = 0; o < 2; ++o) CHECK(g[i * 2 + o] == doctest::Approx(x(i, 0)));
  CHECK(g[6] == 1.0);
  CHECK(g[7] == 1.0);
}

TEST_CASE("zero upstream gives zero gradients") {
  Rng rng(3);
  Mlp net(MlpLayout{{3, 6, 6, 2}});
  net.init(rng);
  Mlp::Cache cache;
  net.forward(random_matrix(3, 4, rng), &cache);
  CHECK(net.backward(cache, Eigen::MatrixXd::Zero(2, 4)).isZero());
}

TEST_CASE("parameter and input gradients match central differences") {
  Rng rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const int in = 1 + rng.uniform_int(4);
    const int h = 2 + rng.uniform_int(5);
    const int out = 1 + rng.uniform_int(3);
    const int batch = 1 + rng.uniform_int(4);
    Mlp net(MlpLayout{{in, h, h, out}});
    net.init(rng);
    net.params() += 0.1 * Eigen::VectorXd::Random(net.params().size());
    const Eigen::MatrixXd x = random_matrix(in, batch, rng);
    const Eigen::MatrixXd up = random_matrix(out, batch, rng);
    Mlp::Cache cache;
    net.forward(x, &cache);
    Eigen::MatrixXd input_grad;
    const Eigen::VectorXd analytic = net.backward(cache, up, &input_grad);
    Mlp probe = net;
    const auto f = [&](const Eigen::VectorXd& p) {
      probe.set_params(p);
      return (probe.forward(x).array() * up.array()).sum();
    };
    CHECK(relative_error(analytic, numeric_gradient(f, net.params())) < 1e-4);

    const auto fx = [&](const Eigen::VectorXd& flat) {
      const Eigen::MatrixXd xi = Eigen::Map<const Eigen::MatrixXd>(flat.data(), in, batch);
      return (net.forward(xi).array() * up.array()).sum();
    };
    const Eigen::VectorXd flat_x = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    const Eigen::VectorXd flat_g =
        Eigen::Map<const Eigen::VectorXd>(input_grad.data(), input_grad.size());
    CHECK(relative_error(flat_g, numeric_gradient(fx, flat_x)) < 1e-4);
  }
}

TEST_CASE("shape errors") {
  Mlp net(MlpLayout{{3, 2}});
  CHECK_THROWS_AS(net.forward(Eigen::MatrixXd::Zero(4, 1)), ContractViolation);
  CHECK_THROWS_AS(net.set_params(Eigen::VectorXd::Zero(3)), ContractViolation);
  const MlpLayout too_short{{3}};
  CHECK_THROWS_AS(too_short.validate(), ValidationError);
  const MlpLayout empty_layer{{3, 0, 2}};
  CHECK_THROWS_AS(empty_layer.validate(), ValidationError);
}

TEST_CASE("Xavier init is bounded, biases zero") {
  Rng rng(5);
  Mlp net(MlpLayout{{10, 20, 4}});
  net.init(rng);
  const double limit1 = std::sqrt(6.0 / 30.0);
  for (int i = 0; i < 200; ++i) CHECK(std::abs(net.params()[i]) <= limit1);
  CHECK(net.params().segment(200, 20).isZero());
}

TEST_CASE("SGD and Adam steps") {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(2, 1.0);
  Eigen::VectorXd g(2);
  g << 2.0, -4.0;
  Sgd sgd(0.5);
  sgd.step(p, g);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 3.0);

  Eigen::VectorXd q = Eigen::VectorXd::Zero(2);
  Adam adam(0.1);
  adam.step(q, g);
  // First Adam step moves each coordinate by lr against the gradient sign.
  CHECK(q[0] == doctest::Approx(-0.1));
  CHECK(q[1] == doctest::Approx(0.1));

  Eigen::VectorXd same = Eigen::VectorXd::Constant(2, 1.0);
  Sgd zero(0.0);
  zero.step(same, g);
  CHECK(same == Eigen::VectorXd::Constant(2, 1.0));
}

TEST_CASE("Adam minimises a quadratic") {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(3, 5.0);
  Adam adam(0.05);
  for (int i = 0; i < 2000; ++i) {
    Eigen::VectorXd g = 2.0 * p;
    adam.step(p, g);
  }
  CHECK(p.norm() < 1e-2);
}

TEST_CASE("gradient clipping") {
  Eigen::VectorXd g(2);
  g << 3.0, 4.0;
  clip_grad_norm(g, 1.0);
  CHECK(g.norm() == doctest::Approx(1.0));
  Eigen::VectorXd h(2);
  h << 0.3, 0.4;
  clip_grad_norm(h, 1.0);
  CHECK(h[0] == 0.3);
  clip_grad_norm(g, 0.0);
  CHECK(g.norm() == doctest::Approx(1.0));
}

TEST_CASE("optimizer names") {
  CHECK(optimizer_from_string("adam") == OptimizerKind::kAdam);
  CHECK(optimizer_from_string("sgd") == OptimizerKind::kSgd);
  CHECK_THROWS_AS(optimizer_from_string("rmsprop"), ValidationError);
}
