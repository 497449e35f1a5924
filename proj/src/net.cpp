#include "pg/net.hpp"

#include <cmath>
#include <stdexcept>

namespace pg {

DenseNet::DenseNet(std::vector<int> sizes, OutputKind kind, double out_lo,
                   double out_hi)
    : sizes_(std::move(sizes)), kind_(kind), lo_(out_lo), hi_(out_hi) {
  if (sizes_.size() < 2) throw std::invalid_argument("DenseNet: need >= 2 layers");
  for (int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("DenseNet: layer sizes must be positive");
  }
  if (kind_ == OutputKind::TanhScaled && !(hi_ > lo_)) {
    throw std::invalid_argument("DenseNet: tanh-scaled output needs out_hi > out_lo");
  }
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    w_.emplace_back(Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
    b_.emplace_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
  }
}

void DenseNet::init_uniform_fan_in(Rng& rng, double final_layer_scale) {
  for (std::size_t l = 0; l < w_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
    const double scale = (l + 1 == w_.size()) ? final_layer_scale : 1.0;
    for (Eigen::Index j = 0; j < w_[l].cols(); ++j) {
      for (Eigen::Index i = 0; i < w_[l].rows(); ++i) {
        w_[l](i, j) = scale * rng.uniform(-bound, bound);
      }
    }
    for (Eigen::Index i = 0; i < b_[l].size(); ++i) {
      b_[l](i) = scale * rng.uniform(-bound, bound);
    }
  }
  cached_ = false;
}

Eigen::MatrixXd DenseNet::forward(const Eigen::MatrixXd& x) const {
  if (x.rows() != input_dim()) throw std::invalid_argument("forward: input dim mismatch");
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Eigen::MatrixXd z = (w_[l] * a).colwise() + b_[l];
    if (l + 1 < w_.size()) {
      a = z.cwiseMax(0.0);
    } else if (kind_ == OutputKind::Linear) {
      a = std::move(z);
    } else {
      a = (lo_ + 0.5 * (hi_ - lo_)) +
          (0.5 * (hi_ - lo_)) * z.array().tanh().matrix().array();
    }
  }
  return a;
}

const Eigen::MatrixXd& DenseNet::forward_cached(const Eigen::MatrixXd& x) {
  if (x.rows() != input_dim()) throw std::invalid_argument("forward: input dim mismatch");
  const std::size_t layers = w_.size();
  acts_.assign(layers + 1, {});
  preacts_.assign(layers, {});
  acts_[0] = x;
  for (std::size_t l = 0; l < layers; ++l) {
    preacts_[l] = (w_[l] * acts_[l]).colwise() + b_[l];
    if (l + 1 < layers) {
      acts_[l + 1] = preacts_[l].cwiseMax(0.0);
    } else if (kind_ == OutputKind::Linear) {
      acts_[l + 1] = preacts_[l];
    } else {
      tanh_out_ = preacts_[l].array().tanh().matrix();
      acts_[l + 1] = ((0.5 * (hi_ - lo_)) * tanh_out_.array() +
                      (lo_ + 0.5 * (hi_ - lo_)))
                         .matrix();
    }
  }
  cached_ = true;
  return acts_[layers];
}

NetGrads DenseNet::backward(const Eigen::MatrixXd& dy, bool with_param_grads) {
  if (!cached_) throw std::logic_error("backward: no cached forward pass");
  const std::size_t layers = w_.size();
  if (dy.rows() != output_dim() || dy.cols() != acts_[layers].cols()) {
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  }

  NetGrads grads;
  if (with_param_grads) grads.layers.resize(layers);

  Eigen::MatrixXd delta;
  if (kind_ == OutputKind::Linear) {
    delta = dy;
  } else {
    delta = dy.array() * (0.5 * (hi_ - lo_)) *
            (1.0 - tanh_out_.array().square());
  }

  for (std::size_t l = layers; l-- > 0;) {
    if (with_param_grads) {
      grads.layers[l].w = delta * acts_[l].transpose();
      grads.layers[l].b = delta.rowwise().sum();
    }
    Eigen::MatrixXd da = w_[l].transpose() * delta;
    if (l > 0) {
      delta = (da.array() * (preacts_[l - 1].array() > 0.0).cast<double>()).matrix();
    } else {
      grads.input = std::move(da);
    }
  }
  cached_ = false;
  return grads;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    n += static_cast<std::size_t>(w_[l].size()) + static_cast<std::size_t>(b_[l].size());
  }
  return n;
}

Eigen::VectorXd DenseNet::flatten() const {
  Eigen::VectorXd theta(parameter_count());
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    theta.segment(at, w_[l].size()) = Eigen::Map<const Eigen::VectorXd>(w_[l].data(), w_[l].size());
    at += w_[l].size();
    theta.segment(at, b_[l].size()) = b_[l];
    at += b_[l].size();
  }
  return theta;
}

void DenseNet::unflatten(const Eigen::VectorXd& theta) {
  if (theta.size() != static_cast<Eigen::Index>(parameter_count())) {
    throw std::invalid_argument("unflatten: parameter count mismatch");
  }
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < w_.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(w_[l].data(), w_[l].size()) = theta.segment(at, w_[l].size());
    at += w_[l].size();
    b_[l] = theta.segment(at, b_[l].size());
    at += b_[l].size();
  }
  cached_ = false;
}

bool same_architecture(const DenseNet& a, const DenseNet& b) {
  return a.sizes() == b.sizes() && a.output_kind() == b.output_kind() &&
         a.out_lo() == b.out_lo() && a.out_hi() == b.out_hi();
}

void soft_update(DenseNet& target, const DenseNet& source, double tau) {
  if (!same_architecture(target, source)) {
    throw std::invalid_argument("soft_update: architecture mismatch");
  }
  for (std::size_t l = 0; l < target.weights().size(); ++l) {
    target.weights()[l] = tau * source.weights()[l] + (1.0 - tau) * target.weights()[l];
    target.biases()[l] = tau * source.biases()[l] + (1.0 - tau) * target.biases()[l];
  }
}

AdamOptimizer::AdamOptimizer(const DenseNet& net, double lr, double beta1,
                             double beta2, double eps)
    : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    m_w_.push_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
    v_w_.push_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
    m_b_.push_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
    v_b_.push_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
  }
}

void AdamOptimizer::step(DenseNet& net, const NetGrads& grads) {
  if (grads.layers.size() != net.weights().size()) {
    throw std::invalid_argument("AdamOptimizer: gradient layer count mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, t_);
  const double c2 = 1.0 - std::pow(b2_, t_);
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    m_w_[l] = b1_ * m_w_[l] + (1.0 - b1_) * grads.layers[l].w;
    v_w_[l] = b2_ * v_w_[l] + (1.0 - b2_) * grads.layers[l].w.array().square().matrix();
    net.weights()[l].array() -=
        lr_ * (m_w_[l].array() / c1) / ((v_w_[l].array() / c2).sqrt() + eps_);

    m_b_[l] = b1_ * m_b_[l] + (1.0 - b1_) * grads.layers[l].b;
    v_b_[l] = b2_ * v_b_[l] + (1.0 - b2_) * grads.layers[l].b.array().square().matrix();
    net.biases()[l].array() -=
        lr_ * (m_b_[l].array() / c1) / ((v_b_[l].array() / c2).sqrt() + eps_);
  }
}

}  // namespace pg
