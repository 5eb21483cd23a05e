#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "luislab/channel.hpp"
#include "luislab/prior.hpp"
#include "luislab/spectral.hpp"
#include "luislab/state_evolution.hpp"

using namespace luis;

namespace {

// Oracle: direct Cauchy-transform summation.
double direct_stieltjes(const SpectralMeasure& measure, double w) {
  double acc = 0.0;
  for (int i = 0; i < measure.eigenvalues.size(); ++i) {
    acc += 1.0 / (w - measure.eigenvalues[i]);
  }
  return acc / measure.eigenvalues.size();
}

// Oracle: invert G on a fine log grid left of the support, then bisect the
// bracketing cell. Independent of the production bisection.
double grid_inversion_r(const SpectralMeasure& measure, double s) {
  double lo = -1e8;
  double hi = -1e-12;
  double wa = lo, wb = hi;
  double prev_w = lo;
  double prev_g = direct_stieltjes(measure, lo);
  const int grid = 200000;
  for (int i = 1; i <= grid; ++i) {
    const double w = lo * std::pow(hi / lo, double(i) / grid);
    const double g = direct_stieltjes(measure, w);
    if ((prev_g - s) * (g - s) <= 0.0) {
      wa = prev_w;
      wb = w;
      break;
    }
    prev_w = w;
    prev_g = g;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (wa + wb);
    ((direct_stieltjes(measure, wa) - s) * (direct_stieltjes(measure, mid) - s) <= 0.0 ? wb
                                                                                       : wa) = mid;
  }
  return 0.5 * (wa + wb) - 1.0 / s;
}

// Oracle: dense log-determinant of B = (1/v - rho) I + snr A^H A.
double dense_log_det(const ChannelInstance& channel, double snr, double rho, double v) {
  const Eigen::MatrixXcd a = channel.dense();
  const int n = a.cols();
  const Eigen::MatrixXcd b =
      (1.0 / v - rho) * Eigen::MatrixXcd::Identity(n, n) + snr * (a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(b);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += std::log(eig.eigenvalues()[i]);
  }
  return acc / n;
}

}  // namespace

TEST_SUITE_BEGIN("spectral");

TEST_CASE("measure: padding and normalization") {
  const SpectralMeasure m = SpectralMeasure::from_spectrum(make_kappa_spectrum(4, 8, 10.0));
  REQUIRE(m.eigenvalues.size() == 8);
  CHECK(m.min_eigenvalue() == 0.0);  // N > T zero modes
  CHECK(m.mean() == doctest::Approx(1.0).epsilon(1e-12));
  m.validate();
}

TEST_CASE("stieltjes: point masses in closed form") {
  SpectralMeasure ones;
  ones.eigenvalues = Eigen::VectorXd::Ones(5);
  CHECK(stieltjes(ones, -1.0) == doctest::Approx(-0.5).epsilon(1e-15));
  SpectralMeasure zeros;
  zeros.eigenvalues = Eigen::VectorXd::Zero(3);
  CHECK(stieltjes(zeros, -2.0) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("stieltjes: matches the direct sum and rejects w >= 0") {
  const SpectralMeasure m = SpectralMeasure::from_spectrum(make_kappa_spectrum(12, 9, 25.0));
  for (double w : {-0.01, -1.0, -50.0}) {
    CHECK(std::abs(stieltjes(m, w) - direct_stieltjes(m, w)) < 1e-14);
  }
  CHECK_THROWS_AS(stieltjes(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(stieltjes(m, 1.0), std::invalid_argument);
}

TEST_CASE("r_transform: unit point mass is constant 1 on its branch") {
  // G(w) = 1/(w - 1) maps w < 0 onto (-1, 0); beyond that interval the
  // principal-branch inversion refuses to extrapolate.
  SpectralMeasure ones;
  ones.eigenvalues = Eigen::VectorXd::Ones(6);
  for (double s : {-0.2, -0.5, -0.99}) {
    CHECK(r_transform(ones, s) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK_THROWS_WITH_AS(r_transform(ones, -1.0), doctest::Contains("admissible"),
                       std::domain_error);
  CHECK_THROWS_WITH_AS(r_transform(ones, -10.0), doctest::Contains("admissible"),
                       std::domain_error);
}

TEST_CASE("r_transform: continuous extension at zero is the mean eigenvalue") {
  const SpectralMeasure m = SpectralMeasure::from_spectrum(make_kappa_spectrum(8, 8, 10.0));
  CHECK(r_transform(m, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r_transform(m, -1e-7) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("r_transform: matches the grid-inversion oracle") {
  const SpectralMeasure m = SpectralMeasure::from_spectrum(make_kappa_spectrum(16, 24, 10.0));
  const double prod = r_transform(m, -0.3);
  CHECK(std::abs(prod - 0.600495236945) < 1e-10);  // frozen oracle output
  CHECK(std::abs(prod - grid_inversion_r(m, -0.3)) < 1e-8);
}

TEST_CASE("r_transform: domain error names the admissible interval") {
  // No zero eigenvalues: admissible s is bounded below by G(0^-).
  const SpectralMeasure m = SpectralMeasure::from_spectrum(make_kappa_spectrum(4, 4, 10.0));
  const double g0 = direct_stieltjes(m, -1e-13);
  CHECK_THROWS_WITH_AS(r_transform(m, g0 * 1.01), doctest::Contains("admissible"),
                       std::domain_error);
  // With zero modes every negative s is admissible.
  const SpectralMeasure wide = SpectralMeasure::from_spectrum(make_kappa_spectrum(4, 8, 10.0));
  CHECK(std::isfinite(r_transform(wide, -100.0)));
}

TEST_CASE("r_transform: nondecreasing on the admissible axis") {
  const SpectralMeasure m = SpectralMeasure::from_spectrum(make_kappa_spectrum(8, 12, 50.0));
  double prev = -1e300;
  for (int i = 0; i <= 60; ++i) {
    const double s = -5.0 + i * (4.99 / 60.0);
    const double r = r_transform(m, s);
    CHECK(r >= prev - 1e-12);
    prev = r;
  }
}

TEST_CASE("r_integral: unit point mass integrates to the upper limit") {
  SpectralMeasure ones;
  ones.eigenvalues = Eigen::VectorXd::Ones(4);
  CHECK(r_integral(ones, 0.7) == doctest::Approx(0.7).epsilon(1e-8));
  CHECK(r_integral(ones, 0.0) == 0.0);
}

TEST_CASE("r_integral: equals the geometric area under the inverse linear curve") {
  // integral_0^{snr v*} R(-z) dz = rho* v* + integral_{rho*}^{snr} eta^{-1}.
  const ChannelSpectrum spectrum = make_kappa_spectrum(12, 12, 10.0);
  const double snr = 4.0;
  const FixedPoint fp = solve_fixed_point(spectrum, snr, qpsk_prior());
  REQUIRE(fp.converged);
  const SpectralMeasure m = SpectralMeasure::from_spectrum(spectrum);
  const double lhs = r_integral(m, snr * fp.v_star);

  const SpectrumSe se(spectrum, snr);
  const int k = 20000;
  double area = fp.rho_star * fp.v_star;
  double prev_rho = fp.rho_star;
  double prev_v = se.eta_inverse(fp.rho_star * (1.0 + 1e-12));
  for (int i = 1; i <= k; ++i) {
    const double rho = fp.rho_star + (snr * (1 - 1e-9) - fp.rho_star) * double(i) / k;
    const double v = se.eta_inverse(rho);
    area += 0.5 * (prev_v + v) * (rho - prev_rho);
    prev_rho = rho;
    prev_v = v;
  }
  CHECK(std::abs(lhs - area) < 1e-3);
}

TEST_CASE("log_det_term: identity fixed point collapses to -ln v*") {
  SpectralMeasure ones;
  ones.eigenvalues = Eigen::VectorXd::Ones(8);
  const double snr = 4.0;
  const double v_star = mmse(qpsk_prior(), snr);
  // Identity spectrum: rho* = snr, shift = 1/v* - snr, so each eigenvalue
  // contributes ln(1/v* - snr + snr) = -ln v*.
  CHECK(log_det_term(ones, snr, snr, v_star) == doctest::Approx(-std::log(v_star)).epsilon(1e-12));
}

TEST_CASE("log_det_term: zero snr and rejected shifts") {
  const SpectralMeasure m = SpectralMeasure::from_spectrum(make_kappa_spectrum(6, 6, 10.0));
  CHECK(log_det_term(m, 0.0, 1.0, 0.25) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(log_det_term(m, 1.0, 5.0, 0.25), std::domain_error);  // 1/v - rho < 0
}

TEST_CASE("log_det_term: matches the dense oracle at N 64") {
  const ChannelSpectrum spectrum = make_kappa_spectrum(64, 64, 10.0);
  const ChannelInstance channel = sample_channel(spectrum, 1.0, 313);
  const SpectralMeasure m = SpectralMeasure::from_spectrum(spectrum);
  const double snr = 2.0, rho = 1.3, v = 0.4;
  CHECK(std::abs(log_det_term(m, snr, rho, v) - dense_log_det(channel, snr, rho, v)) < 1e-10);
}

TEST_CASE("gaussian_capacity: closed forms") {
  SpectralMeasure ones;
  ones.eigenvalues = Eigen::VectorXd::Ones(5);
  CHECK(gaussian_capacity(ones, 3.0) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  const SpectralMeasure m = SpectralMeasure::from_spectrum(make_kappa_spectrum(8, 8, 10.0));
  CHECK(gaussian_capacity(m, 0.0) == 0.0);
}

TEST_SUITE_END();
