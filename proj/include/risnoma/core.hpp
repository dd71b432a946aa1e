#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace risnoma {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Raised when an input violates an operation's precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a channel makes an optimization step undefined (e.g. an all-zero cascade).
class DegenerateChannel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which NOMA user an operation refers to. U1 is the near (untrusted) user, U2 the far user.
enum class User : int { near = 1, far = 2 };

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Minimum-rate threshold in bps/Hz mapped to an SNR threshold.
inline double snr_threshold(double rate_bps_hz) { return std::exp2(rate_bps_hz) - 1.0; }

/// Wraps an angle into [0, 2*pi).
inline double wrap_phase(double phi) {
  double r = std::fmod(phi, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

/// Polar angle of z; zero-amplitude entries are assigned angle 0.
inline double polar_angle(Complex z) {
  return (z == Complex{0.0, 0.0}) ? 0.0 : std::arg(z);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

}  // namespace risnoma
