#include "oransim/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace oransim {

Mlp::Mlp(int input_dim, int hidden_layers, int hidden_units, int output_dim)
    : input_dim_(input_dim), output_dim_(output_dim) {
  int in = input_dim;
  for (int l = 0; l < hidden_layers; ++l) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(in, hidden_units));
    biases_.emplace_back(Eigen::RowVectorXd::Zero(hidden_units));
    in = hidden_units;
  }
  weights_.emplace_back(Eigen::MatrixXd::Zero(in, output_dim));
  biases_.emplace_back(Eigen::RowVectorXd::Zero(output_dim));
}

void Mlp::init_he(Rng& rng) {
  for (auto& w : weights_) {
    const double scale = std::sqrt(2.0 / w.rows());
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        w(i, j) = scale * rng.normal();
      }
    }
  }
  for (auto& b : biases_) {
    b.setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd h = x;
  const int layers = num_layers();
  for (int l = 0; l < layers; ++l) {
    h = (h * weights_[l]).rowwise() + biases_[l];
    if (l + 1 < layers) {
      h = h.cwiseMax(0.0);
    }
  }
  return h;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape& tape) const {
  tape.activations.clear();
  tape.activations.push_back(x);
  Eigen::MatrixXd h = x;
  const int layers = num_layers();
  for (int l = 0; l < layers; ++l) {
    h = (h * weights_[l]).rowwise() + biases_[l];
    if (l + 1 < layers) {
      h = h.cwiseMax(0.0);
      tape.activations.push_back(h);
    }
  }
  return h;
}

Mlp::Gradients Mlp::backward(const Tape& tape,
                             const Eigen::MatrixXd& dout) const {
  const int layers = num_layers();
  if (static_cast<int>(tape.activations.size()) != layers) {
    throw std::logic_error("Mlp::backward: tape does not match this net");
  }
  Gradients g;
  g.w.resize(layers);
  g.b.resize(layers);

  Eigen::MatrixXd delta = dout;
  for (int l = layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd& input = tape.activations[l];
    g.w[l] = input.transpose() * delta;
    g.b[l] = delta.colwise().sum();
    if (l > 0) {
      // ReLU derivative gates on the recorded post-activation values.
      delta = (delta * weights_[l].transpose()).array() *
              (tape.activations[l].array() > 0.0).cast<double>();
    }
  }
  return g;
}

size_t Mlp::parameter_count() const {
  size_t n = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    n += weights_[l].size() + biases_[l].size();
  }
  return n;
}

void Mlp::flatten_to(std::vector<double>& out) const {
  for (size_t l = 0; l < weights_.size(); ++l) {
    out.insert(out.end(), weights_[l].data(),
               weights_[l].data() + weights_[l].size());
    out.insert(out.end(), biases_[l].data(),
               biases_[l].data() + biases_[l].size());
  }
}

size_t Mlp::unflatten_from(const double* data, size_t available) {
  size_t used = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    const size_t wn = weights_[l].size();
    const size_t bn = biases_[l].size();
    if (used + wn + bn > available) {
      throw std::runtime_error("Mlp::unflatten_from: not enough data");
    }
    std::copy(data + used, data + used + wn, weights_[l].data());
    used += wn;
    std::copy(data + used, data + used + bn, biases_[l].data());
    used += bn;
  }
  return used;
}

void AdamState::match(const Mlp& net) {
  mw.clear();
  vw.clear();
  mb.clear();
  vb.clear();
  for (const auto& w : net.weights()) {
    mw.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    vw.emplace_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  }
  for (const auto& b : net.biases()) {
    mb.emplace_back(Eigen::RowVectorXd::Zero(b.size()));
    vb.emplace_back(Eigen::RowVectorXd::Zero(b.size()));
  }
  step = 0;
}

void AdamState::flatten_to(std::vector<double>& out) const {
  for (size_t l = 0; l < mw.size(); ++l) {
    out.insert(out.end(), mw[l].data(), mw[l].data() + mw[l].size());
    out.insert(out.end(), mb[l].data(), mb[l].data() + mb[l].size());
  }
  for (size_t l = 0; l < vw.size(); ++l) {
    out.insert(out.end(), vw[l].data(), vw[l].data() + vw[l].size());
    out.insert(out.end(), vb[l].data(), vb[l].data() + vb[l].size());
  }
}

size_t AdamState::unflatten_from(const double* data, size_t available) {
  size_t used = 0;
  auto pull = [&](double* dst, size_t n) {
    if (used + n > available) {
      throw std::runtime_error("AdamState::unflatten_from: not enough data");
    }
    std::copy(data + used, data + used + n, dst);
    used += n;
  };
  for (size_t l = 0; l < mw.size(); ++l) {
    pull(mw[l].data(), mw[l].size());
    pull(mb[l].data(), mb[l].size());
  }
  for (size_t l = 0; l < vw.size(); ++l) {
    pull(vw[l].data(), vw[l].size());
    pull(vb[l].data(), vb[l].size());
  }
  return used;
}

void adam_step(Mlp& net, const Mlp::Gradients& grads, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (int l = 0; l < net.num_layers(); ++l) {
    auto& w = net.weights()[l];
    auto& b = net.biases()[l];
    state.mw[l] = beta1 * state.mw[l] + (1.0 - beta1) * grads.w[l];
    state.vw[l] =
        beta2 * state.vw[l].array() +
        (1.0 - beta2) * grads.w[l].array().square();
    state.mb[l] = beta1 * state.mb[l] + (1.0 - beta1) * grads.b[l];
    state.vb[l] =
        beta2 * state.vb[l].array() +
        (1.0 - beta2) * grads.b[l].array().square();

    w.array() -= lr * (state.mw[l].array() / bc1) /
                 ((state.vw[l].array() / bc2).sqrt() + eps);
    b.array() -= lr * (state.mb[l].array() / bc1) /
                 ((state.vb[l].array() / bc2).sqrt() + eps);
  }
}

void soft_update(Mlp& target, const Mlp& online, double coeff) {
  for (int l = 0; l < target.num_layers(); ++l) {
    target.weights()[l] =
        coeff * online.weights()[l] + (1.0 - coeff) * target.weights()[l];
    target.biases()[l] =
        coeff * online.biases()[l] + (1.0 - coeff) * target.biases()[l];
  }
}

}  // namespace oransim
