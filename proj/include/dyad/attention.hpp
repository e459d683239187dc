#pragma once

#include <cmath>
#include <vector>

#include "dyad/nn.hpp"

namespace dyad {
namespace nn {

// Multi-head scaled dot-product self-attention with output projection.
struct MultiHeadSelfAttention {
  int n_heads = 1;
  Linear wq, wk, wv, wo;
  // caches for backward
  Mat q_cache, k_cache, v_cache, attn_out_cache;
  std::vector<Mat> probs_cache;

  MultiHeadSelfAttention() = default;
  MultiHeadSelfAttention(const std::string& name, Eigen::Index dim, int heads, Rng& rng)
      : n_heads(heads),
        wq(name + ".wq", dim, dim, rng), wk(name + ".wk", dim, dim, rng),
        wv(name + ".wv", dim, dim, rng), wo(name + ".wo", dim, dim, rng) {
    if (dim % heads != 0) throw ValidationError(name + ": dim not divisible by heads");
  }

  Mat forward(const Mat& x, bool keep = false) {
    const Eigen::Index d = wq.w.w.rows();
    const Eigen::Index dh = d / n_heads;
    const double scale = 1.0 / std::sqrt(double(dh));
    Mat q = wq.forward(x, keep), k = wk.forward(x, keep), v = wv.forward(x, keep);
    Mat attn_out(x.rows(), d);
    if (keep) probs_cache.assign(size_t(n_heads), Mat());
    for (int h = 0; h < n_heads; ++h) {
      const auto qh = q.middleCols(h * dh, dh);
      const auto kh = k.middleCols(h * dh, dh);
      const auto vh = v.middleCols(h * dh, dh);
      Mat probs = softmax_rows(qh * kh.transpose() * scale);
      attn_out.middleCols(h * dh, dh).noalias() = probs * vh;
      if (keep) probs_cache[size_t(h)] = std::move(probs);
    }
    if (keep) { q_cache = std::move(q); k_cache = std::move(k); v_cache = std::move(v);
                attn_out_cache = attn_out; }
    return wo.forward(attn_out, keep);
  }

  Mat backward(const Mat& dy) {
    const Eigen::Index d = wq.w.w.rows();
    const Eigen::Index dh = d / n_heads;
    const double scale = 1.0 / std::sqrt(double(dh));
    const Mat d_attn_out = wo.backward(dy);
    Mat dq(dy.rows(), d), dk(dy.rows(), d), dv(dy.rows(), d);
    for (int h = 0; h < n_heads; ++h) {
      const auto qh = q_cache.middleCols(h * dh, dh);
      const auto kh = k_cache.middleCols(h * dh, dh);
      const auto vh = v_cache.middleCols(h * dh, dh);
      const auto dout_h = d_attn_out.middleCols(h * dh, dh);
      const Mat& probs = probs_cache[size_t(h)];
      const Mat dprobs = dout_h * vh.transpose();
      const Mat dscores = softmax_rows_backward(probs, dprobs);
      dv.middleCols(h * dh, dh).noalias() = probs.transpose() * dout_h;
      dq.middleCols(h * dh, dh).noalias() = dscores * kh * scale;
      dk.middleCols(h * dh, dh).noalias() = dscores.transpose() * qh * scale;
    }
    return wq.backward(dq) + wk.backward(dk) + wv.backward(dv);
  }

  ParamRefs params() {
    ParamRefs out;
    for (auto* l : {&wq, &wk, &wv, &wo})
      for (auto* p : l->params()) out.push_back(p);
    return out;
  }
};

// Single-head attention over frames followed by a mean over the attended
// frames; reduces T x d to a d-vector. No output projection.
struct AttnProjector {
  Param wq, wk, wv;
  Mat x_cache, q_cache, k_cache, v_cache, probs_cache;

  AttnProjector() = default;
  AttnProjector(const std::string& name, Eigen::Index dim, Rng& rng)
      : wq(name + ".wq", dim, dim), wk(name + ".wk", dim, dim), wv(name + ".wv", dim, dim) {
    xavier_init(wq, rng, double(dim), double(dim));
    xavier_init(wk, rng, double(dim), double(dim));
    xavier_init(wv, rng, double(dim), double(dim));
  }

  Vec forward(const Mat& x, bool keep = false) {
    if (x.rows() < 1) throw ValidationError("attn_project: empty frame sequence");
    if (x.cols() != wq.w.rows())
      throw ValidationError("attn_project: input width " + std::to_string(x.cols()) +
                            " != " + std::to_string(wq.w.rows()));
    const double scale = 1.0 / std::sqrt(double(x.cols()));
    Mat q = x * wq.w, k = x * wk.w, v = x * wv.w;
    Mat probs = softmax_rows(q * k.transpose() * scale);
    Vec pooled = (probs * v).colwise().mean();
    if (keep) { x_cache = x; q_cache = std::move(q); k_cache = std::move(k);
                v_cache = std::move(v); probs_cache = std::move(probs); }
    return pooled;
  }

  Mat backward(const Vec& dpooled) {
    const Eigen::Index t = x_cache.rows();
    const double scale = 1.0 / std::sqrt(double(x_cache.cols()));
    Mat dout = (Mat::Ones(t, 1) / double(t)) * dpooled.transpose();
    const Mat dprobs = dout * v_cache.transpose();
    const Mat dscores = softmax_rows_backward(probs_cache, dprobs);
    const Mat dv = probs_cache.transpose() * dout;
    const Mat dq = dscores * k_cache * scale;
    const Mat dk = dscores.transpose() * q_cache * scale;
    wq.g.noalias() += x_cache.transpose() * dq;
    wk.g.noalias() += x_cache.transpose() * dk;
    wv.g.noalias() += x_cache.transpose() * dv;
    return dq * wq.w.transpose() + dk * wk.w.transpose() + dv * wv.w.transpose();
  }

  ParamRefs params() { return {&wq, &wk, &wv}; }
};

}  // namespace nn
}  // namespace dyad
