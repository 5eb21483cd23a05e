#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace luis {

// Singular-value profile of an m x n linear operator. Values are
// nonincreasing and their squares sum to n (unit mean eigenvalue of A^H A).
struct ChannelSpectrum {
  int rows = 0;  // m
  int cols = 0;  // n
  Eigen::VectorXd singular_values;  // length min(m, n)

  int rank() const { return static_cast<int>(singular_values.size()); }
  double aspect_ratio() const { return static_cast<double>(cols) / rows; }  // beta = n/m
  void validate() const;
};

// Geometric ladder with condition number kappa: d_i / d_{i+1} = kappa^{1/T}.
ChannelSpectrum make_kappa_spectrum(int m, int n, double kappa);

void write_spectrum_csv(const std::string& path, const ChannelSpectrum& spectrum);
ChannelSpectrum read_spectrum_csv(const std::string& path);

enum class Rotation {
  haar,        // both factors Haar
  haar_right,  // left factor pinned to identity; exact in law for isotropic noise
  identity,    // both factors identity (analytic tests)
};

// Realized operator A = U^H diag(d) V in factored form plus the noise level.
// An empty rotation matrix stands for the identity; multiplication helpers
// hide the distinction so iterative solvers never materialize A.
struct ChannelInstance {
  ChannelSpectrum spectrum;
  Eigen::MatrixXcd left;   // U, m x m (empty = identity)
  Eigen::MatrixXcd right;  // V, n x n (empty = identity)
  double noise_variance = 1.0;  // sigma^2 per complex entry

  Eigen::VectorXcd mul_left(const Eigen::VectorXcd& v) const;        // U v
  Eigen::VectorXcd mul_left_adjoint(const Eigen::VectorXcd& v) const;   // U^H v
  Eigen::VectorXcd mul_right(const Eigen::VectorXcd& v) const;       // V v
  Eigen::VectorXcd mul_right_adjoint(const Eigen::VectorXcd& v) const;  // V^H v

  // A x (no noise)
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  // Dense A; intended for small sizes in tests and diagnostics.
  Eigen::MatrixXcd dense() const;
};

// Haar-distributed unitary via QR of an iid complex Gaussian matrix with the
// R-diagonal phase fix.
Eigen::MatrixXcd sample_haar_unitary(int dim, std::mt19937_64& gen);

ChannelInstance sample_channel(const ChannelSpectrum& spectrum, double noise_variance,
                               std::uint64_t seed, Rotation rotation = Rotation::haar);

// y = A x + w, w iid CN(0, noise_variance).
Eigen::VectorXcd apply_channel(const ChannelInstance& channel, const Eigen::VectorXcd& x,
                               std::mt19937_64& noise_gen);

}  // namespace luis
