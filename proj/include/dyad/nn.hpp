#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dyad/common.hpp"
#include "dyad/rng.hpp"

namespace dyad {
namespace nn {

struct Param {
  std::string name;
  Mat w;
  Mat g;
  Param() = default;
  Param(std::string n, Eigen::Index rows, Eigen::Index cols)
      : name(std::move(n)), w(Mat::Zero(rows, cols)), g(Mat::Zero(rows, cols)) {}
  void zero_grad() { g.setZero(); }
  Eigen::Index size() const { return w.size(); }
};

using ParamRefs = std::vector<Param*>;

inline void zero_grads(const ParamRefs& ps) {
  for (auto* p : ps) p->zero_grad();
}

inline Eigen::Index param_count(const ParamRefs& ps) {
  Eigen::Index n = 0;
  for (auto* p : ps) n += p->size();
  return n;
}

inline void xavier_init(Param& p, Rng& rng, double fan_in, double fan_out) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index i = 0; i < p.w.size(); ++i)
    p.w.data()[i] = rng.uniform(-bound, bound);
}

// ---- activations ----

inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline Mat relu(const Mat& x) { return x.cwiseMax(0.0); }

inline Mat relu_backward(const Mat& x, const Mat& dy) {
  return (x.array() > 0.0).select(dy, Mat::Zero(dy.rows(), dy.cols()));
}

inline double gelu_scalar(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

inline Mat gelu(const Mat& x) { return x.unaryExpr([](double v) { return gelu_scalar(v); }); }

inline Mat gelu_backward(const Mat& x, const Mat& dy) {
  Mat dx = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    const double cdf = 0.5 * (1.0 + std::erf(v * M_SQRT1_2));
    const double pdf = std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI);
    dx.data()[i] = dy.data()[i] * (cdf + v * pdf);
  }
  return dx;
}

inline Mat softmax_rows(const Mat& x) {
  Mat y = x;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double m = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - m).exp();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

// dS given A = softmax(S) row-wise and dA
inline Mat softmax_rows_backward(const Mat& a, const Mat& da) {
  Mat ds = a;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    const double dot = a.row(r).dot(da.row(r));
    ds.row(r) = a.row(r).cwiseProduct((da.row(r).array() - dot).matrix());
  }
  return ds;
}

inline Vec softmax_vec(const Vec& x) {
  Vec y = (x.array() - x.maxCoeff()).exp();
  return y / y.sum();
}

// ---- layers ----

// y = x W + b, x is rows x in
struct Linear {
  Param w, b;
  Mat x_cache;

  Linear() = default;
  Linear(const std::string& name, Eigen::Index in, Eigen::Index out, Rng& rng)
      : w(name + ".w", in, out), b(name + ".b", 1, out) {
    xavier_init(w, rng, double(in), double(out));
  }

  Mat forward(const Mat& x, bool keep = false) {
    if (x.cols() != w.w.rows())
      throw ValidationError(w.name + ": input width " + std::to_string(x.cols()) +
                            " != " + std::to_string(w.w.rows()));
    if (keep) x_cache = x;
    return (x * w.w).rowwise() + b.w.row(0);
  }

  Mat backward(const Mat& dy) {
    w.g.noalias() += x_cache.transpose() * dy;
    b.g.row(0) += dy.colwise().sum();
    return dy * w.w.transpose();
  }

  ParamRefs params() { return {&w, &b}; }
};

// row-wise normalization over features
struct LayerNorm {
  Param gamma, beta;
  double eps = 1e-5;
  Mat xhat_cache;
  Vec inv_std_cache;

  LayerNorm() = default;
  LayerNorm(const std::string& name, Eigen::Index dim)
      : gamma(name + ".gamma", 1, dim), beta(name + ".beta", 1, dim) {
    gamma.w.setOnes();
  }

  Mat forward(const Mat& x, bool keep = false) {
    const Eigen::Index d = x.cols();
    Mat xhat(x.rows(), d);
    Vec inv_std(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const double mu = x.row(r).mean();
      const double var = (x.row(r).array() - mu).square().mean();
      inv_std(r) = 1.0 / std::sqrt(var + eps);
      xhat.row(r) = (x.row(r).array() - mu) * inv_std(r);
    }
    if (keep) { xhat_cache = xhat; inv_std_cache = inv_std; }
    return (xhat.array().rowwise() * gamma.w.row(0).array()).rowwise() +
           beta.w.row(0).array();
  }

  Mat backward(const Mat& dy) {
    const double d = double(dy.cols());
    Mat dx(dy.rows(), dy.cols());
    for (Eigen::Index r = 0; r < dy.rows(); ++r) {
      const auto dxhat = (dy.row(r).array() * gamma.w.row(0).array()).matrix();
      const double m1 = dxhat.mean();
      const double m2 = dxhat.cwiseProduct(xhat_cache.row(r)).mean();
      dx.row(r) = ((dxhat.array() - m1) - xhat_cache.row(r).array() * m2) * inv_std_cache(r);
      (void)d;
    }
    gamma.g.row(0) += dy.cwiseProduct(xhat_cache).colwise().sum();
    beta.g.row(0) += dy.colwise().sum();
    return dx;
  }

  ParamRefs params() { return {&gamma, &beta}; }
};

// inverted dropout: survivors scaled by 1/(1-p)
struct Dropout {
  double p = 0.3;
  Mat mask_cache;

  Mat forward(const Mat& x, bool training, Rng& rng, bool keep = false) {
    if (!training || p <= 0.0) {
      if (keep) mask_cache = Mat::Ones(x.rows(), x.cols());
      return x;
    }
    Mat mask(x.rows(), x.cols());
    const double scale = 1.0 / (1.0 - p);
    for (Eigen::Index i = 0; i < mask.size(); ++i)
      mask.data()[i] = rng.bernoulli(p) ? 0.0 : scale;
    if (keep) mask_cache = mask;
    return x.cwiseProduct(mask);
  }

  Mat backward(const Mat& dy) { return dy.cwiseProduct(mask_cache); }
};

// ---- optimizer ----

// Adam with the usual bias correction; weight_decay is added to the
// gradient (L2 regularization convention).
struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double weight_decay = 0.0;
  std::vector<Mat> m, v;
  long t = 0;

  Adam() = default;
  explicit Adam(double lr_, double weight_decay_ = 0.0) : lr(lr_), weight_decay(weight_decay_) {}

  void attach(const ParamRefs& ps) {
    m.clear(); v.clear(); t = 0;
    for (auto* p : ps) {
      m.push_back(Mat::Zero(p->w.rows(), p->w.cols()));
      v.push_back(Mat::Zero(p->w.rows(), p->w.cols()));
    }
  }

  void step(const ParamRefs& ps) {
    if (m.size() != ps.size()) throw Error("adam: attach() before step()");
    ++t;
    const double bc1 = 1.0 - std::pow(beta1, double(t));
    const double bc2 = 1.0 - std::pow(beta2, double(t));
    for (size_t i = 0; i < ps.size(); ++i) {
      Param& p = *ps[i];
      Mat g = p.g;
      if (weight_decay != 0.0) g += weight_decay * p.w;
      m[i] = beta1 * m[i] + (1.0 - beta1) * g;
      v[i] = beta2 * v[i] + (1.0 - beta2) * g.cwiseProduct(g);
      const Mat mhat = m[i] / bc1;
      const Mat vhat = v[i] / bc2;
      p.w.array() -= lr * mhat.array() / (vhat.array().sqrt() + eps);
    }
  }
};

}  // namespace nn
}  // namespace dyad
