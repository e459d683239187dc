#pragma once

#include <string>

#include "dyad/nn.hpp"

namespace dyad {
namespace nn {

// Valid (no padding) 1-D convolution over the frame axis via im2col.
// Input rows are frames, columns are channels. Kernel weights are stored
// as (in_ch * kernel) x out_ch; tap j of channel c sits at row j*in_ch + c.
struct Conv1d {
  int kernel = 1, stride = 1;
  Param w, b;
  Mat im2col_cache;
  Eigen::Index in_rows_cache = 0;

  Conv1d() = default;
  Conv1d(const std::string& name, Eigen::Index in_ch, Eigen::Index out_ch, int kernel_,
         int stride_, Rng& rng)
      : kernel(kernel_), stride(stride_),
        w(name + ".w", in_ch * kernel_, out_ch), b(name + ".b", 1, out_ch) {
    xavier_init(w, rng, double(in_ch * kernel_), double(out_ch));
  }

  Eigen::Index in_channels() const { return w.w.rows() / kernel; }

  Eigen::Index out_frames(Eigen::Index in_frames) const {
    if (in_frames < kernel) return 0;
    return (in_frames - kernel) / stride + 1;
  }

  Mat forward(const Mat& x, bool keep = false) {
    const Eigen::Index in_ch = in_channels();
    if (x.cols() != in_ch)
      throw ValidationError(w.name + ": input channels " + std::to_string(x.cols()) +
                            " != " + std::to_string(in_ch));
    const Eigen::Index t_out = out_frames(x.rows());
    if (t_out < 1)
      throw ValidationError(w.name + ": input of " + std::to_string(x.rows()) +
                            " frames shorter than kernel " + std::to_string(kernel));
    Mat cols(t_out, in_ch * kernel);
    for (Eigen::Index t = 0; t < t_out; ++t)
      for (int j = 0; j < kernel; ++j)
        cols.block(t, j * in_ch, 1, in_ch) = x.row(t * stride + j);
    if (keep) { im2col_cache = cols; in_rows_cache = x.rows(); }
    return (cols * w.w).rowwise() + b.w.row(0);
  }

  Mat backward(const Mat& dy) {
    const Eigen::Index in_ch = in_channels();
    w.g.noalias() += im2col_cache.transpose() * dy;
    b.g.row(0) += dy.colwise().sum();
    const Mat dcols = dy * w.w.transpose();
    Mat dx = Mat::Zero(in_rows_cache, in_ch);
    for (Eigen::Index t = 0; t < dy.rows(); ++t)
      for (int j = 0; j < kernel; ++j)
        dx.row(t * stride + j) += dcols.block(t, j * in_ch, 1, in_ch);
    return dx;
  }

  ParamRefs params() { return {&w, &b}; }
};

}  // namespace nn
}  // namespace dyad
