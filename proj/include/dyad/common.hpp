#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace dyad {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MatF = Eigen::MatrixXf;

// Error taxonomy. The CLI maps ValidationError (and subtypes) to exit
// code 2 and DivergenceError to exit code 3.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};
struct FormatError : ValidationError {
  explicit FormatError(const std::string& msg) : ValidationError(msg) {}
};
struct RangeError : ValidationError {
  explicit RangeError(const std::string& msg) : ValidationError(msg) {}
};
struct UnsupportedRateError : ValidationError {
  explicit UnsupportedRateError(const std::string& msg) : ValidationError(msg) {}
};
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};
struct DivergenceError : Error {
  explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

inline void warn(const std::string& msg) {
  std::fprintf(stderr, "warning: %s\n", msg.c_str());
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

inline bool all_finite(const Mat& m) { return m.allFinite(); }

}  // namespace dyad
