#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace duality {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Validation tolerances shared by the whole library.  Inputs are rejected,
// not silently repaired, when they miss these windows.
inline constexpr double kHermTol = 1e-10;
inline constexpr double kEigenvalueTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPovmSumTol = 1e-9;
inline constexpr double kIsometryTol = 1e-10;
inline constexpr double kZeroProbability = 1e-14;
inline constexpr double kSqrtClampTol = 1e-8;
inline constexpr double kUnbiasedTol = 1e-10;

enum class Errc {
  invalid_argument,
  dimension_mismatch,
  not_hermitian,
  not_psd,
  bad_trace,
  not_a_distribution,
  not_normalized,
  not_unitary,
  not_trace_preserving,
  not_povm,
  not_symmetric_coupler,
  out_of_range,
  zero_probability,
  no_convergence,
  config_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace duality
