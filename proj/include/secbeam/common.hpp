#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace secbeam {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

enum class ErrorCode {
  kInvalidDimension,
  kInvalidArgument,
  kNotHermitian,
  kRankDeficient,
  kExtractionFailure,
  kInitializationFailure,
  kNumericalFailure,
  kInvalidConfig,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Natural-log to bits conversion factor (log2 e).
inline constexpr double kLog2E = 1.4426950408889634074;

}  // namespace secbeam
