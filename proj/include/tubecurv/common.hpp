#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tubecurv {

using Vec = Eigen::VectorXd;

// Input violates an operation contract (non-tangent vector, weight mismatch, ...).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// Point lies outside the chart / parameter domain of a catalogue entry.
struct OutOfDomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Point is farther from the manifold than the reach bound sigma0.
struct OutOfReachError : std::domain_error {
  using std::domain_error::domain_error;
};

// A Poisson draw produced an empty cloud; caller must resample or raise intensity.
struct EmptyCloudError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sampler acceptance collapsed or an experiment exceeds a hard guardrail.
struct MisconfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// small numerics

class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

struct Quadrature1D {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule of order n (exact for polynomials of degree <= 2n-1).
Quadrature1D gauss_legendre(int n);

// Least-squares slope of log|y| against log x, ignoring non-finite / zero y.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Two-term Richardson extrapolation for a quantity with an O(h) remainder,
// evaluated at the two finest levels of a dyadic sequence h, h/2, h/4, ...
// values[i] corresponds to h_i = h0 / 2^i.
double richardson(std::span<const double> values);

inline double sqr(double x) { return x * x; }

// Formats a double so that parsing the text recovers the exact bits.
std::string format_double(double x);

}  // namespace tubecurv
