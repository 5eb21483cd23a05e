#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "luislab/channel.hpp"
#include "luislab/prior.hpp"

namespace luis {

// Second-order transfer functions of the linear (LMMSE) stage for a fixed
// spectrum and snr. v denotes an input error variance, rho an output SNR.
//
// All inversions are monotone bisections to 1e-12 relative. The curve
// rho = eta(v) is traced through the parametrization (gamma_se(u),
// gamma_hat(u)), which makes eta and its inverse single-bisection operations
// and keeps them exact at the shared fixed point.
class SpectrumSe {
 public:
  SpectrumSe(const ChannelSpectrum& spectrum, double snr);

  double snr() const { return snr_; }
  int dim() const { return n_; }

  double gamma_hat(double v) const;          // strictly increasing, gamma_hat(v) < v
  double gamma_hat_prime(double v) const;
  double gamma_se(double v) const;           // nonincreasing, limit snr at v -> 0
  double gs_coefficient(double v) const;     // gamma_hat(v) / v
  double gs_complement(double v) const;      // 1 - gs_coefficient(v), cancellation-free
  double gamma_hat_inverse(double v) const;
  double gamma_se_inverse(double rho) const;
  double eta(double v) const;                // gamma_se(gamma_hat_inverse(v))
  double eta_inverse(double rho) const;

  // sup over v of gamma_hat; finite iff the padded measure has no zeros.
  double gamma_hat_sup() const;
  // infimum of gamma_se / eta; positive iff gamma_hat_sup is finite.
  double rho_floor() const;

 private:
  Eigen::VectorXd lam_;  // squared singular values, length min(m, n)
  int n_ = 0;            // ambient dimension (columns)
  double snr_ = 0.0;

  double mass_below(double v) const;  // B(v) = gamma_hat(v) / v, computed directly
  double mass_above(double v) const;  // 1 - B(v) without cancellation
};

struct FixedPoint {
  double rho_star = 0.0;
  double v_star = 1.0;
  int iterations = 0;
  bool converged = false;  // alternation met tolerance and the crossing is unique
  bool unique = true;
};

// Transfer characteristic of the nonlinear stage: rho -> posterior mmse.
using PhiHat = std::function<double(double)>;

PhiHat phi_hat_of(const Prior& prior);

// Alternation v_{t+1} = phi(gamma_se(v_t)) from v0 = 1 until |dv|/v <= 1e-12
// or 10^4 iterations, followed by a uniqueness scan of the equivalent
// (eta, phi_hat) crossing on a 10^3-point log grid.
FixedPoint solve_fixed_point(const ChannelSpectrum& spectrum, double snr, const Prior& prior);
FixedPoint solve_fixed_point(const ChannelSpectrum& spectrum, double snr, const PhiHat& phi_hat);

enum class CurveKind { eta_inverse, constellation_mmse, code_mmse, min_envelope };

std::string to_string(CurveKind kind);

// Monotone sampled curve in the (rho, v) plane.
struct SeCurve {
  CurveKind kind = CurveKind::constellation_mmse;
  std::vector<double> rho;
  std::vector<double> v;
  void validate() const;  // rho strictly increasing, v positive nonincreasing
};

inline constexpr double kCurveFloor = 1e-12;

// For eta_inverse and min_envelope the grid must lie within [0, snr]; grid
// points with no finite inverse are skipped and a terminal sample
// (snr, kCurveFloor) records the drop to zero error.
SeCurve sample_curve(CurveKind kind, const ChannelSpectrum& spectrum, double snr,
                     const Prior& prior, const std::vector<double>& grid);

void write_curve_csv(const std::string& path, const SeCurve& curve);
SeCurve read_curve_csv(const std::string& path);

// Wraps measured NLE samples as a code_mmse curve. The cumulative minimum is
// applied so sampling noise cannot break monotonicity, and values are clamped
// to kCurveFloor.
SeCurve curve_from_samples(const std::vector<double>& rho, const std::vector<double>& v);

// Measured or tabulated NLE characteristic with log-linear interpolation.
// Values are clamped to kCurveFloor before taking logs; outside the sampled
// range evaluation falls back to the constellation characteristic and sets
// the extrapolation flag.
struct TabulatedPhiHat {
  std::vector<double> rho;  // strictly increasing, starting at 0
  std::vector<double> v;

  double rho_max() const { return rho.empty() ? 0.0 : rho.back(); }
  double eval(double r) const;  // within the sampled range
};

struct SeTrace {
  std::vector<double> v;    // length t_max + 1, v[0] = 1
  std::vector<double> rho;  // length t_max
  bool clamped = false;        // a nonlinear step had v_post >= 1/rho
  bool extrapolated = false;   // a code curve was evaluated beyond its range
};

SeTrace trace_se(const ChannelSpectrum& spectrum, double snr, const Prior& prior, int t_max);
SeTrace trace_se(const ChannelSpectrum& spectrum, double snr, const TabulatedPhiHat& code_curve,
                 const Prior& constellation, int t_max);

}  // namespace luis
