#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pg/rng.hpp"

namespace pg {

enum class OutputKind { Linear, TanhScaled };

struct LayerGrads {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
};

struct NetGrads {
  std::vector<LayerGrads> layers;  // empty when only input grads were requested
  Eigen::MatrixXd input;           // d(objective)/d(input), in x batch
};

// Fully connected net with rectifier hidden layers and either a linear
// output (critic) or a tanh output rescaled to [out_lo, out_hi] (actor).
// Inputs and activations are column-per-sample matrices.
class DenseNet {
 public:
  DenseNet(std::vector<int> sizes, OutputKind kind, double out_lo = 0.0,
           double out_hi = 0.0);

  // Scaled-uniform fan-in init, U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the last
  // layer is shrunk by final_layer_scale.
  void init_uniform_fan_in(Rng& rng, double final_layer_scale = 1.0);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }
  OutputKind output_kind() const { return kind_; }
  double out_lo() const { return lo_; }
  double out_hi() const { return hi_; }
  std::size_t layer_count() const { return w_.size(); }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;

  // Forward pass that caches activations for backward().
  const Eigen::MatrixXd& forward_cached(const Eigen::MatrixXd& x);

  // Reverse-mode gradients of sum(dy .* output) w.r.t. parameters and input.
  // Requires a cached forward; with_param_grads=false skips the weight
  // gradients and only returns input gradients.
  NetGrads backward(const Eigen::MatrixXd& dy, bool with_param_grads = true);

  std::size_t parameter_count() const;
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& theta);

  std::vector<Eigen::MatrixXd>& weights() { return w_; }
  std::vector<Eigen::VectorXd>& biases() { return b_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return w_; }
  const std::vector<Eigen::VectorXd>& biases() const { return b_; }

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> w_;  // w_[l]: sizes_[l+1] x sizes_[l]
  std::vector<Eigen::VectorXd> b_;
  OutputKind kind_;
  double lo_ = 0.0, hi_ = 0.0;

  bool cached_ = false;
  std::vector<Eigen::MatrixXd> acts_;     // acts_[0] = input, then per layer
  std::vector<Eigen::MatrixXd> preacts_;  // pre-activation of each layer
  Eigen::MatrixXd tanh_out_;              // tanh(u) cache for TanhScaled
};

bool same_architecture(const DenseNet& a, const DenseNet& b);

// theta_target <- tau * theta_source + (1 - tau) * theta_target
void soft_update(DenseNet& target, const DenseNet& source, double tau);

// Adaptive moment estimation with standard decay constants.
class AdamOptimizer {
 public:
  AdamOptimizer(const DenseNet& net, double lr, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);

  void step(DenseNet& net, const NetGrads& grads);
  long steps_taken() const { return t_; }
  double learning_rate() const { return lr_; }

 private:
  double lr_, b1_, b2_, eps_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> m_w_, v_w_;
  std::vector<Eigen::VectorXd> m_b_, v_b_;
};

}  // namespace pg
