#include "luislab/rng.hpp"

namespace luis::rng {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive(std::uint64_t master, Stream stream) {
  return splitmix64(master ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(stream)));
}

std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

std::complex<double> standard_cgauss(std::mt19937_64& gen) {
  // Real and imaginary parts each carry half the variance.
  std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(2.0));
  const double re = n(gen);
  const double im = n(gen);
  return {re, im};
}

void fill_cgauss(std::mt19937_64& gen, double variance, Eigen::VectorXcd& out) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double re = n(gen);
    const double im = n(gen);
    out[i] = std::complex<double>(re, im);
  }
}

Eigen::MatrixXcd cgauss_matrix(std::mt19937_64& gen, int rows, int cols) {
  Eigen::MatrixXcd g(rows, cols);
  std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(2.0));
  // Column-major fill; the fill order is part of the determinism contract.
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = n(gen);
      const double im = n(gen);
      g(i, j) = std::complex<double>(re, im);
    }
  }
  return g;
}

}  // namespace luis::rng
