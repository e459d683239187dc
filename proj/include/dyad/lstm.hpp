#pragma once

#include <string>

#include "dyad/nn.hpp"

namespace dyad {
namespace nn {

namespace lstmdetail {

// One direction. Gate order in the 4H-wide blocks: input, forget, cell, output.
struct LstmDir {
  Param w_ih, w_hh, b;
  Eigen::Index hidden = 0;
  // caches (T x H each)
  Mat x_cache, gi, gf, gg, go, c_states, tanh_c, h_prev;

  LstmDir() = default;
  LstmDir(const std::string& name, Eigen::Index in, Eigen::Index h, Rng& rng)
      : w_ih(name + ".w_ih", in, 4 * h), w_hh(name + ".w_hh", h, 4 * h),
        b(name + ".b", 1, 4 * h), hidden(h) {
    xavier_init(w_ih, rng, double(in), double(4 * h));
    xavier_init(w_hh, rng, double(h), double(4 * h));
  }

  // x is T x in, already in scan order for this direction
  Mat forward(const Mat& x, bool keep) {
    const Eigen::Index t_len = x.rows(), h = hidden;
    Mat out(t_len, h);
    Mat pre = (x * w_ih.w).rowwise() + b.w.row(0);
    Eigen::RowVectorXd hp = Eigen::RowVectorXd::Zero(h);
    Eigen::RowVectorXd cp = Eigen::RowVectorXd::Zero(h);
    if (keep) {
      x_cache = x;
      gi.resize(t_len, h); gf.resize(t_len, h); gg.resize(t_len, h); go.resize(t_len, h);
      c_states.resize(t_len, h); tanh_c.resize(t_len, h); h_prev.resize(t_len, h);
    }
    for (Eigen::Index t = 0; t < t_len; ++t) {
      Eigen::RowVectorXd z = pre.row(t) + hp * w_hh.w;
      Eigen::RowVectorXd i = z.segment(0, h).unaryExpr([](double v) { return sigmoid(v); });
      Eigen::RowVectorXd f = z.segment(h, h).unaryExpr([](double v) { return sigmoid(v); });
      Eigen::RowVectorXd g = z.segment(2 * h, h).array().tanh();
      Eigen::RowVectorXd o = z.segment(3 * h, h).unaryExpr([](double v) { return sigmoid(v); });
      Eigen::RowVectorXd c = f.cwiseProduct(cp) + i.cwiseProduct(g);
      Eigen::RowVectorXd tc = c.array().tanh();
      if (keep) {
        gi.row(t) = i; gf.row(t) = f; gg.row(t) = g; go.row(t) = o;
        c_states.row(t) = c; tanh_c.row(t) = tc; h_prev.row(t) = hp;
      }
      hp = o.cwiseProduct(tc);
      cp = c;
      out.row(t) = hp;
    }
    return out;
  }

  Mat backward(const Mat& dh_out) {
    const Eigen::Index t_len = dh_out.rows(), h = hidden;
    Mat dx = Mat::Zero(t_len, x_cache.cols());
    Eigen::RowVectorXd dh_next = Eigen::RowVectorXd::Zero(h);
    Eigen::RowVectorXd dc_next = Eigen::RowVectorXd::Zero(h);
    for (Eigen::Index t = t_len - 1; t >= 0; --t) {
      const Eigen::RowVectorXd dh = dh_out.row(t) + dh_next;
      const Eigen::RowVectorXd do_ = dh.cwiseProduct(tanh_c.row(t));
      Eigen::RowVectorXd dc =
          dh.cwiseProduct(go.row(t))
              .cwiseProduct((1.0 - tanh_c.row(t).array().square()).matrix()) + dc_next;
      const Eigen::RowVectorXd cprev =
          t > 0 ? Eigen::RowVectorXd(c_states.row(t - 1)) : Eigen::RowVectorXd::Zero(h);
      Eigen::RowVectorXd dz(4 * h);
      dz.segment(0, h) = dc.cwiseProduct(gg.row(t))
          .cwiseProduct(gi.row(t)).cwiseProduct((1.0 - gi.row(t).array()).matrix());
      dz.segment(h, h) = dc.cwiseProduct(cprev)
          .cwiseProduct(gf.row(t)).cwiseProduct((1.0 - gf.row(t).array()).matrix());
      dz.segment(2 * h, h) = dc.cwiseProduct(gi.row(t))
          .cwiseProduct((1.0 - gg.row(t).array().square()).matrix());
      dz.segment(3 * h, h) = do_.cwiseProduct(go.row(t))
          .cwiseProduct((1.0 - go.row(t).array()).matrix());

      w_ih.g.noalias() += x_cache.row(t).transpose() * dz;
      w_hh.g.noalias() += h_prev.row(t).transpose() * dz;
      b.g.row(0) += dz;
      dx.row(t) = dz * w_ih.w.transpose();
      dh_next = dz * w_hh.w.transpose();
      dc_next = dc.cwiseProduct(gf.row(t));
    }
    return dx;
  }

  ParamRefs params() { return {&w_ih, &w_hh, &b}; }
};

}  // namespace lstmdetail

// Bidirectional LSTM; outputs the two directions concatenated (T x 2H).
struct BiLstm {
  lstmdetail::LstmDir fwd, bwd;

  BiLstm() = default;
  BiLstm(const std::string& name, Eigen::Index in, Eigen::Index h, Rng& rng)
      : fwd(name + ".fwd", in, h, rng), bwd(name + ".bwd", in, h, rng) {}

  Mat forward(const Mat& x, bool keep = false) {
    const Mat out_f = fwd.forward(x, keep);
    const Mat out_b = bwd.forward(x.colwise().reverse(), keep);
    Mat out(x.rows(), 2 * fwd.hidden);
    out.leftCols(fwd.hidden) = out_f;
    out.rightCols(fwd.hidden) = out_b.colwise().reverse();
    return out;
  }

  Mat backward(const Mat& dy) {
    const Mat dx_f = fwd.backward(dy.leftCols(fwd.hidden));
    const Mat dx_b = bwd.backward(dy.rightCols(fwd.hidden).colwise().reverse());
    return dx_f + dx_b.colwise().reverse();
  }

  ParamRefs params() {
    ParamRefs out = fwd.params();
    for (auto* p : bwd.params()) out.push_back(p);
    return out;
  }
};

}  // namespace nn
}  // namespace dyad
