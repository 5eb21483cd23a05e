#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <vector>

#include <Eigen/SVD>

#include "luislab/channel.hpp"
#include "luislab/rng.hpp"

using namespace luis;

namespace {

// Oracle: recomputed singular values of the assembled dense matrix.
Eigen::VectorXd svd_singular_values(const Eigen::MatrixXcd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues();
}

// Oracle: two-sided Kolmogorov-Smirnov distance against Uniform[0,1].
double ks_uniform(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double u = samples[i];
    d = std::max(d, std::abs((i + 1) / n - u));
    d = std::max(d, std::abs(u - i / n));
  }
  return d;
}

double max_abs(const Eigen::MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("kappa spectrum: flat ladder at kappa 1") {
  const ChannelSpectrum s = make_kappa_spectrum(4, 4, 1.0);
  REQUIRE(s.rank() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(s.singular_values[i] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("kappa spectrum: two-step ladder closed form") {
  // c^2 kappa^(2/2)(... ) with T = 2: d1^2 + d2^2 = 2 and d1/d2 = sqrt(10)
  // give d1 = sqrt(20/11), d2 = sqrt(2/11).
  const ChannelSpectrum s = make_kappa_spectrum(2, 2, 10.0);
  CHECK(std::abs(s.singular_values[0] - std::sqrt(20.0 / 11.0)) < 1e-12);
  CHECK(std::abs(s.singular_values[1] - std::sqrt(2.0 / 11.0)) < 1e-12);
}

TEST_CASE("kappa spectrum: rank one forces d1 = sqrt(n)") {
  const ChannelSpectrum s = make_kappa_spectrum(1, 2, 7.5);
  REQUIRE(s.rank() == 1);
  CHECK(std::abs(s.singular_values[0] - std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("kappa spectrum: normalization, ratio, and extremes") {
  for (const auto& [m, n, kappa] : {std::tuple{8, 8, 10.0}, {12, 8, 50.0}, {8, 12, 3.0}}) {
    const ChannelSpectrum s = make_kappa_spectrum(m, n, kappa);
    const int t = s.rank();
    REQUIRE(t == std::min(m, n));
    CHECK(std::abs(s.singular_values.squaredNorm() - n) < 1e-12 * n);
    for (int i = 0; i + 1 < t; ++i) {
      CHECK(s.singular_values[i] / s.singular_values[i + 1] ==
            doctest::Approx(std::pow(kappa, 1.0 / t)).epsilon(1e-12));
    }
    CHECK(s.singular_values[0] / s.singular_values[t - 1] ==
          doctest::Approx(std::pow(kappa, double(t - 1) / t)).epsilon(1e-12));
  }
}

TEST_CASE("kappa spectrum: rejects bad arguments") {
  CHECK_THROWS_AS(make_kappa_spectrum(0, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_kappa_spectrum(4, -1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_kappa_spectrum(4, 4, 0.5), std::invalid_argument);
}

TEST_CASE("sample_channel: deterministic in the seed") {
  const ChannelSpectrum s = make_kappa_spectrum(6, 4, 5.0);
  const ChannelInstance a = sample_channel(s, 0.1, 1234);
  const ChannelInstance b = sample_channel(s, 0.1, 1234);
  CHECK(max_abs(a.left - b.left) == 0.0);
  CHECK(max_abs(a.right - b.right) == 0.0);
  const ChannelInstance c = sample_channel(s, 0.1, 1235);
  CHECK(max_abs(a.left - c.left) > 1e-3);
}

TEST_CASE("sample_channel: identity rotation is exact") {
  const ChannelSpectrum s = make_kappa_spectrum(3, 3, 4.0);
  const ChannelInstance ch = sample_channel(s, 0.5, 7, Rotation::identity);
  const Eigen::MatrixXcd a = ch.dense();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const std::complex<double> want = i == j ? s.singular_values[i] : 0.0;
      CHECK(std::abs(a(i, j) - want) == 0.0);
    }
  }
}

TEST_CASE("sample_channel: rotations are unitary to 1e-10") {
  const ChannelSpectrum s = make_kappa_spectrum(10, 14, 20.0);
  const ChannelInstance ch = sample_channel(s, 1.0, 99);
  const Eigen::MatrixXcd iu = ch.left.adjoint() * ch.left;
  const Eigen::MatrixXcd iv = ch.right.adjoint() * ch.right;
  CHECK(max_abs(iu - Eigen::MatrixXcd::Identity(10, 10)) < 1e-10);
  CHECK(max_abs(iv - Eigen::MatrixXcd::Identity(14, 14)) < 1e-10);
}

TEST_CASE("sample_channel: assembled matrix has the requested spectrum") {
  for (const auto& [m, n] : {std::pair{24, 16}, {16, 24}}) {
    const ChannelSpectrum s = make_kappa_spectrum(m, n, 10.0);
    const ChannelInstance ch = sample_channel(s, 1.0, 4242);
    const Eigen::VectorXd sv = svd_singular_values(ch.dense());
    REQUIRE(sv.size() >= s.rank());
    for (int i = 0; i < s.rank(); ++i) {
      CHECK(std::abs(sv[i] - s.singular_values[i]) < 1e-10);
    }
  }
}

TEST_CASE("sample_channel: factored multiplies agree with the dense matrix") {
  const ChannelSpectrum s = make_kappa_spectrum(9, 7, 6.0);
  const ChannelInstance ch = sample_channel(s, 1.0, 5);
  const Eigen::MatrixXcd a = ch.dense();
  auto gen = rng::make_engine(17);
  const Eigen::MatrixXcd probe = rng::cgauss_matrix(gen, 7, 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(max_abs(ch.apply(probe.col(j)) - a * probe.col(j)) < 1e-12);
  }
}

TEST_CASE("apply_channel: noiseless identity returns the input") {
  const ChannelSpectrum s = make_kappa_spectrum(5, 5, 1.0);
  ChannelInstance ch = sample_channel(s, 1e-300, 3, Rotation::identity);
  auto gen = rng::make_engine(11);
  Eigen::VectorXcd x(5);
  rng::fill_cgauss(gen, 1.0, x);
  auto noise_gen = rng::make_engine(12);
  const Eigen::VectorXcd y = apply_channel(ch, x, noise_gen);
  CHECK((y - x).cwiseAbs().maxCoeff() < 1e-140);
}

TEST_CASE("apply_channel: zero input yields noise at the configured power") {
  const int m = 400;
  const ChannelSpectrum s = make_kappa_spectrum(m, m, 2.0);
  const double sigma2 = 0.37;
  const ChannelInstance ch = sample_channel(s, sigma2, 21, Rotation::identity);
  auto noise_gen = rng::make_engine(22);
  double power = 0.0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    const Eigen::VectorXcd y = apply_channel(ch, Eigen::VectorXcd::Zero(m), noise_gen);
    power += y.squaredNorm();
  }
  power /= double(m) * reps;
  CHECK(power == doctest::Approx(sigma2).epsilon(0.02));
}

TEST_CASE("apply_channel: reproducible for a fixed noise stream") {
  const ChannelSpectrum s = make_kappa_spectrum(6, 6, 3.0);
  const ChannelInstance ch = sample_channel(s, 0.2, 8);
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(6);
  auto g1 = rng::make_engine(77);
  auto g2 = rng::make_engine(77);
  const Eigen::VectorXcd y1 = apply_channel(ch, x, g1);
  const Eigen::VectorXcd y2 = apply_channel(ch, x, g2);
  CHECK(max_abs(y1 - y2) == 0.0);
  CHECK_THROWS_AS(apply_channel(ch, Eigen::VectorXcd::Zero(5), g1), std::invalid_argument);
}

TEST_CASE("haar sampling: |V11|^2 is uniform on [0,1]") {
  // For a 2x2 Haar unitary the squared magnitude of any entry is exactly
  // Uniform[0,1]; KS critical value at the 1e-3 level is 1.9495/sqrt(k).
  const int k = 100000;
  std::vector<double> samples(k);
  auto gen = rng::make_engine(2024);
  for (int i = 0; i < k; ++i) {
    const Eigen::MatrixXcd v = sample_haar_unitary(2, gen);
    samples[i] = std::norm(v(0, 0));
  }
  CHECK(ks_uniform(std::move(samples)) < 1.9495 / std::sqrt(double(k)));
}

TEST_CASE("energy: E|Ax|^2 approaches sum d_i^2 for isotropic x") {
  const ChannelSpectrum s = make_kappa_spectrum(96, 64, 10.0);
  const ChannelInstance ch = sample_channel(s, 1.0, 31);
  auto gen = rng::make_engine(32);
  double acc = 0.0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    Eigen::VectorXcd x(64);
    rng::fill_cgauss(gen, 1.0, x);
    acc += ch.apply(x).squaredNorm();
  }
  acc /= reps;
  CHECK(acc == doctest::Approx(s.singular_values.squaredNorm()).epsilon(0.02));
}

TEST_CASE("spectrum csv round trip") {
  const ChannelSpectrum s = make_kappa_spectrum(5, 7, 12.0);
  const std::string path = (std::filesystem::temp_directory_path() / "spectrum_rt.csv").string();
  write_spectrum_csv(path, s);
  const ChannelSpectrum r = read_spectrum_csv(path);
  CHECK(r.rows == s.rows);
  CHECK(r.cols == s.cols);
  REQUIRE(r.rank() == s.rank());
  CHECK(max_abs((r.singular_values - s.singular_values).cast<std::complex<double>>()) == 0.0);
  std::remove(path.c_str());
}

TEST_SUITE_END();
