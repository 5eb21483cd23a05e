#include "luislab/spectral.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "luislab/quadrature.hpp"

namespace luis {

SpectralMeasure SpectralMeasure::from_spectrum(const ChannelSpectrum& spectrum) {
  spectrum.validate();
  SpectralMeasure measure;
  measure.eigenvalues = Eigen::VectorXd::Zero(spectrum.cols);
  const int t = spectrum.rank();
  measure.eigenvalues.head(t) = spectrum.singular_values.head(t).array().square();
  return measure;
}

void SpectralMeasure::validate() const {
  if (eigenvalues.size() == 0) throw std::invalid_argument("measure: empty");
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues[i] >= 0)) throw std::invalid_argument("measure: negative eigenvalue");
    if (i > 0 && eigenvalues[i] > eigenvalues[i - 1] * (1 + 1e-12))
      throw std::invalid_argument("measure: eigenvalues must be nonincreasing");
  }
}

double stieltjes(const SpectralMeasure& measure, double w) {
  if (!(w < 0)) throw std::invalid_argument("stieltjes: w must be negative");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < measure.eigenvalues.size(); ++i)
    acc += 1.0 / (w - measure.eigenvalues[i]);
  return acc / static_cast<double>(measure.eigenvalues.size());
}

double r_transform(const SpectralMeasure& measure, double s) {
  if (s == 0.0) return measure.mean();
  if (!(s < 0)) throw std::invalid_argument("r_transform: s must be <= 0");
  const double lam_min = measure.min_eigenvalue();
  if (lam_min > 0) {
    // Range of G over w < 0 is (G(0^-), 0); outside it the principal branch
    // would need w > 0 and we refuse to extrapolate.
    const double g0 = stieltjes(measure, -1e-300);
    if (!(s > g0)) {
      std::ostringstream msg;
      msg << "r_transform: s = " << s << " outside the admissible interval (" << g0 << ", 0)";
      throw std::domain_error(msg.str());
    }
  }
  // Solve G(R + 1/s) = s for R directly; R lies in [0, mean] because the
  // R-transform is nondecreasing on the negative axis with R(0) = mean.
  // Working in R avoids the w - 1/s cancellation for s near 0.
  const double inv_s = 1.0 / s;
  auto residual = [&](double r_val) {
    const double w = r_val + inv_s;
    if (w >= lam_min) return -1.0;  // past the pole; same sign as G(w) - s below the root
    double acc = 0.0;
    for (Eigen::Index i = 0; i < measure.eigenvalues.size(); ++i)
      acc += 1.0 / (w - measure.eigenvalues[i]);
    return acc / static_cast<double>(measure.eigenvalues.size()) - s;
  };
  double lo = 0.0, hi = measure.mean();
  if (residual(lo) < 0) return 0.0;  // root pinned at the left edge (degenerate measures)
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) >= 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double r_integral(const SpectralMeasure& measure, double upper, double tol) {
  if (!(upper >= 0)) throw std::invalid_argument("r_integral: upper must be >= 0");
  if (upper == 0.0) return 0.0;
  // Fails fast if the endpoint leaves the admissible domain.
  (void)r_transform(measure, -upper);
  return quad::integrate([&](double z) { return r_transform(measure, -z); }, 0.0, upper, tol);
}

double log_det_term(const SpectralMeasure& measure, double snr, double rho, double v) {
  if (!(snr >= 0)) throw std::invalid_argument("log_det_term: snr must be >= 0");
  if (!(v > 0)) throw std::invalid_argument("log_det_term: v must be positive");
  const double shift = 1.0 / v - rho;
  if (!(shift > 0)) throw std::domain_error("log_det_term: requires 1/v > rho");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < measure.eigenvalues.size(); ++i)
    acc += std::log(shift + snr * measure.eigenvalues[i]);
  return acc / static_cast<double>(measure.eigenvalues.size());
}

double gaussian_capacity(const SpectralMeasure& measure, double snr) {
  if (!(snr >= 0)) throw std::invalid_argument("gaussian_capacity: snr must be >= 0");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < measure.eigenvalues.size(); ++i)
    acc += std::log1p(snr * measure.eigenvalues[i]);
  return acc / static_cast<double>(measure.eigenvalues.size());
}

}  // namespace luis
