#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oransim/mlp.hpp"

#include <cmath>
#include <vector>

using namespace oransim;

namespace {

double mse_loss(const Mlp& net, const Eigen::MatrixXd& x,
                const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd out = net.forward(x);
  return 0.5 * (out - y).squaredNorm();
}

// Max relative error between analytic and central-difference gradients of
// the 0.5 * ||f(x) - y||^2 loss over every parameter.
double max_grad_error(Mlp& net, const Eigen::MatrixXd& x,
                      const Eigen::MatrixXd& y) {
  Mlp::Tape tape;
  const Eigen::MatrixXd out = net.forward(x, tape);
  const Mlp::Gradients grads = net.backward(tape, out - y);

  const double h = 1e-6;
  double worst = 0.0;
  auto probe = [&](double& theta, double analytic) {
    const double saved = theta;
    theta = saved + h;
    const double lp = mse_loss(net, x, y);
    theta = saved - h;
    const double lm = mse_loss(net, x, y);
    theta = saved;
    const double numeric = (lp - lm) / (2.0 * h);
    const double denom = std::max({1e-6, std::abs(analytic), std::abs(numeric)});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };

  for (int l = 0; l < net.num_layers(); ++l) {
    for (Eigen::Index i = 0; i < net.weights()[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < net.weights()[l].cols(); ++j) {
        probe(net.weights()[l](i, j), grads.w[l](i, j));
      }
    }
    for (Eigen::Index j = 0; j < net.biases()[l].size(); ++j) {
      probe(net.biases()[l](j), grads.b[l](j));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("forward shape and zero input") {
  Mlp net(3, 2, 8, 4);
  Rng rng(1);
  net.init_he(rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(5, 3);
  const Eigen::MatrixXd out = net.forward(x);
  CHECK(out.rows() == 5);
  CHECK(out.cols() == 4);
  // Zero input with zero biases flows zeros to the output.
  CHECK(out.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("a linear network reproduces its weight matrix") {
  Mlp net(2, 0, 0, 2);  // single linear layer
  REQUIRE(net.num_layers() == 1);
  net.weights()[0] << 1.0, 2.0, 3.0, 4.0;
  net.biases()[0] << 0.5, -0.5;
  Eigen::MatrixXd x(1, 2);
  x << 1.0, 1.0;
  const Eigen::MatrixXd out = net.forward(x);
  CHECK(out(0, 0) == doctest::Approx(1.0 + 3.0 + 0.5));
  CHECK(out(0, 1) == doctest::Approx(2.0 + 4.0 - 0.5));
}

TEST_CASE("relu masks negative preactivations") {
  Mlp net(1, 1, 1, 1);
  net.weights()[0](0, 0) = 1.0;
  net.biases()[0](0) = 0.0;
  net.weights()[1](0, 0) = 1.0;
  net.biases()[1](0) = 0.0;
  Eigen::MatrixXd x(2, 1);
  x << -3.0, 2.0;
  const Eigen::MatrixXd out = net.forward(x);
  CHECK(out(0, 0) == doctest::Approx(0.0));
  CHECK(out(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("analytic gradients match central differences on 20 random nets") {
  Rng rng(9001);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = 1 + static_cast<int>(rng.uniform_index(4));
    const int hidden_layers = static_cast<int>(rng.uniform_index(3));
    const int width = 1 + static_cast<int>(rng.uniform_index(5));
    const int out = 1 + static_cast<int>(rng.uniform_index(3));
    const int batch = 1 + static_cast<int>(rng.uniform_index(4));

    Mlp net(in, hidden_layers, width, out);
    net.init_he(rng);
    // Nudge biases off zero so ReLU kinks land away from the probe points.
    for (int l = 0; l < net.num_layers(); ++l) {
      for (Eigen::Index j = 0; j < net.biases()[l].size(); ++j) {
        net.biases()[l](j) = rng.uniform(-0.3, 0.3);
      }
    }

    Eigen::MatrixXd x(batch, in);
    Eigen::MatrixXd y(batch, out);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x.data()[i] = rng.uniform(-1.0, 1.0);
    }
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      y.data()[i] = rng.uniform(-1.0, 1.0);
    }

    CHECK(max_grad_error(net, x, y) < 1e-4);
  }
}

TEST_CASE("adam steps reduce the loss on a small regression") {
  Mlp net(2, 1, 16, 1);
  Rng rng(17);
  net.init_he(rng);
  AdamState adam;
  adam.match(net);

  Eigen::MatrixXd x(8, 2);
  Eigen::MatrixXd y(8, 1);
  for (int i = 0; i < 8; ++i) {
    x(i, 0) = rng.uniform(-1.0, 1.0);
    x(i, 1) = rng.uniform(-1.0, 1.0);
    y(i, 0) = 0.3 * x(i, 0) - 0.7 * x(i, 1) + 0.1;
  }

  const double before = mse_loss(net, x, y);
  for (int step = 0; step < 200; ++step) {
    Mlp::Tape tape;
    const Eigen::MatrixXd out = net.forward(x, tape);
    const Mlp::Gradients grads = net.backward(tape, out - y);
    adam_step(net, grads, adam, 1e-2, 0.9, 0.999, 1e-8);
  }
  const double after = mse_loss(net, x, y);
  CHECK(after < 0.05 * before);
  CHECK(adam.step == 200);
}

TEST_CASE("soft update blends parameters toward the online net") {
  Mlp online(2, 1, 4, 1);
  Mlp target(2, 1, 4, 1);
  Rng rng(3);
  online.init_he(rng);
  target.init_he(rng);

  const double w_online = online.weights()[0](0, 0);
  const double w_target = target.weights()[0](0, 0);
  soft_update(target, online, 0.01);
  CHECK(target.weights()[0](0, 0) ==
        doctest::Approx(0.01 * w_online + 0.99 * w_target));

  // coeff = 1 copies the online net outright.
  soft_update(target, online, 1.0);
  CHECK(target.weights()[0](0, 0) == doctest::Approx(w_online));
}

TEST_CASE("flatten and unflatten round trip every parameter") {
  Mlp net(3, 2, 7, 5);
  Rng rng(12);
  net.init_he(rng);
  std::vector<double> flat;
  net.flatten_to(flat);
  REQUIRE(flat.size() == net.parameter_count());

  Mlp copy(3, 2, 7, 5);
  const size_t used = copy.unflatten_from(flat.data(), flat.size());
  CHECK(used == flat.size());
  std::vector<double> flat2;
  copy.flatten_to(flat2);
  REQUIRE(flat2.size() == flat.size());
  for (size_t i = 0; i < flat.size(); ++i) {
    CHECK(flat[i] == flat2[i]);
  }
}

TEST_CASE("adam state flattens to twice the parameter count") {
  Mlp net(2, 1, 4, 3);
  AdamState adam;
  adam.match(net);
  std::vector<double> flat;
  adam.flatten_to(flat);
  CHECK(flat.size() == 2 * net.parameter_count());
}
