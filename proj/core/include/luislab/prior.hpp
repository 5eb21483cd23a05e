#pragma once

#include <complex>
#include <random>
#include <string>
#include <vector>

namespace luis {

// Unit-power input prior for the scalar observation model r = sqrt(rho) x + z
// with z ~ CN(0, 1). All rates and entropies are in nats.
struct Prior {
  enum class Kind { discrete, gaussian, bernoulli_gaussian };

  Kind kind = Kind::discrete;
  std::string name;

  // kind == discrete
  std::vector<std::complex<double>> points;
  std::vector<double> probs;

  // Product constellations factor into independent per-axis alphabets, which
  // collapses the 2-D noise quadrature into two 1-D rules. Exact, not an
  // approximation; set only by built-ins whose structure is known.
  bool separable = false;
  std::vector<double> axis_re_points, axis_re_probs;
  std::vector<double> axis_im_points, axis_im_probs;

  // kind == bernoulli_gaussian: P(x != 0) = sparsity, nonzeros CN(0, 1/sparsity).
  double sparsity = 1.0;

  void validate() const;
};

Prior qpsk_prior();   // (+-1 +-i)/sqrt(2), Gray mapped: bit0 -> real sign, bit1 -> imag sign
Prior bpsk_prior();   // +-1 on the real axis
Prior gaussian_prior();
Prior bernoulli_gaussian_prior(double sparsity);
Prior discrete_prior(std::vector<std::complex<double>> points, std::vector<double> probs,
                     std::string name = "discrete");

// CSV rows re,im,prob.
Prior prior_from_csv(const std::string& path);
// "qpsk" | "bpsk" | "gaussian" | "bernoulli-gaussian:<p>" | path to a CSV file.
Prior parse_prior(const std::string& text);

struct PosteriorStat {
  std::complex<double> mean;
  double variance;  // E[|x|^2 | r] - |mean|^2
};

std::complex<double> posterior_mean(const Prior& prior, std::complex<double> r, double rho);
PosteriorStat posterior_stat(const Prior& prior, std::complex<double> r, double rho);

// E|x - E[x|r]|^2 under the scalar model; Gauss-Hermite order per noise axis.
double mmse(const Prior& prior, double rho, int quad_order = 80);

// I(x; r) in nats.
double mutual_information(const Prior& prior, double rho, int quad_order = 80);

// -sum p ln p for discrete priors; +inf for continuous ones.
double prior_entropy(const Prior& prior);

// Nearest constellation point (discrete priors only).
std::complex<double> hard_decision(const Prior& prior, std::complex<double> value);

std::complex<double> sample_prior(const Prior& prior, std::mt19937_64& gen);

}  // namespace luis
