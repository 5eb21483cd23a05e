#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace luis::rng {

// Stream tags for fixed-offset seed splitting. A run derives independent
// sub-streams from one master seed so that results do not depend on the
// number of workers or on evaluation order.
enum class Stream : std::uint64_t {
  channel = 1,
  noise = 2,
  data = 3,
  construction = 4,
};

std::uint64_t splitmix64(std::uint64_t x);

// Sub-seed for a named stream of a given master seed.
std::uint64_t derive(std::uint64_t master, Stream stream);

// Per-trial seed; trials are decorrelated again through derive().
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return master ^ trial;
}

std::mt19937_64 make_engine(std::uint64_t seed);

// Standard circularly symmetric complex Gaussian CN(0, 1).
std::complex<double> standard_cgauss(std::mt19937_64& gen);

// Fills with iid CN(0, variance) entries.
void fill_cgauss(std::mt19937_64& gen, double variance, Eigen::VectorXcd& out);
Eigen::MatrixXcd cgauss_matrix(std::mt19937_64& gen, int rows, int cols);

}  // namespace luis::rng
