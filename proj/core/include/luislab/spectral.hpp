#pragma once

#include <Eigen/Dense>

#include "luislab/channel.hpp"

namespace luis {

// Empirical eigenvalue measure of A^H A: squared singular values padded with
// n - min(m, n) zeros. Mean eigenvalue is 1 for unit-normalized spectra.
struct SpectralMeasure {
  Eigen::VectorXd eigenvalues;  // length n, nonincreasing

  static SpectralMeasure from_spectrum(const ChannelSpectrum& spectrum);
  double mean() const { return eigenvalues.mean(); }
  double min_eigenvalue() const { return eigenvalues[eigenvalues.size() - 1]; }
  double max_eigenvalue() const { return eigenvalues[0]; }
  void validate() const;
};

// G(w) = (1/N) sum_i 1/(w - lambda_i), w < 0.
double stieltjes(const SpectralMeasure& measure, double w);

// R(s) = G^{-1}(s) - 1/s for s < 0, continuously extended by R(0) = mean.
// The functional inverse is restricted to w < 0: for measures without zero
// eigenvalues this bounds the admissible s from below by G(0^-).
double r_transform(const SpectralMeasure& measure, double s);

// integral_0^upper R(-z) dz, adaptive quadrature to `tol` absolute.
double r_integral(const SpectralMeasure& measure, double upper, double tol = 1e-8);

// (1/N) sum_i ln((1/v - rho) + snr * lambda_i); requires 1/v > rho.
double log_det_term(const SpectralMeasure& measure, double snr, double rho, double v);

// (1/N) sum_i ln(1 + snr * lambda_i).
double gaussian_capacity(const SpectralMeasure& measure, double snr);

}  // namespace luis
