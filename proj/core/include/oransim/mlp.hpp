#pragma once

#include <Eigen/Dense>
#include <vector>

#include "oransim/rng.hpp"

namespace oransim {

// Fully connected ReLU network with a linear output layer. Rows are samples.
// Backprop and the optimizer are implemented here directly; Eigen only
// supplies the matrix arithmetic.
class Mlp {
 public:
  struct Tape {
    std::vector<Eigen::MatrixXd> activations;  // input + each hidden output
  };
  struct Gradients {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::RowVectorXd> b;
  };

  Mlp() = default;
  Mlp(int input_dim, int hidden_layers, int hidden_units, int output_dim);

  // He-normal weights, zero biases.
  void init_he(Rng& rng);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape& tape) const;

  // Backpropagates dL/d(output) recorded against `tape` and returns
  // parameter gradients (summed over the batch; scale dout beforehand).
  Gradients backward(const Tape& tape, const Eigen::MatrixXd& dout) const;

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  int num_layers() const { return static_cast<int>(weights_.size()); }
  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::RowVectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::RowVectorXd>& biases() const { return biases_; }

  size_t parameter_count() const;
  void flatten_to(std::vector<double>& out) const;
  // Reads parameter_count() doubles; returns elements consumed.
  size_t unflatten_from(const double* data, size_t available);

 private:
  int input_dim_ = 0;
  int output_dim_ = 0;
  // weights_[l] has shape in_l x out_l (row-sample convention: y = x*W + b).
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::RowVectorXd> biases_;
};

// Adam moments, one slot per parameter tensor.
struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::RowVectorXd> mb, vb;
  int64_t step = 0;

  void match(const Mlp& net);
  void flatten_to(std::vector<double>& out) const;
  size_t unflatten_from(const double* data, size_t available);
};

void adam_step(Mlp& net, const Mlp::Gradients& grads, AdamState& state,
               double lr, double beta1, double beta2, double eps);

// target <- coeff * online + (1 - coeff) * target.
void soft_update(Mlp& target, const Mlp& online, double coeff);

}  // namespace oransim
