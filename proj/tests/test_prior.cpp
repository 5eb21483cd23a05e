#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <vector>

#include "luislab/prior.hpp"
#include "luislab/quadrature.hpp"
#include "luislab/rng.hpp"

using namespace luis;
using cd = std::complex<double>;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Oracle: Monte-Carlo mmse for QPSK with direct 4-point posterior weights,
// independent of the quadrature path. Frozen at 1e7 samples, seed 42:
// 0.4496102852; quadrature agrees to 1.1e-5.
double mc_mmse_qpsk(double rho, long samples, unsigned seed) {
  const cd pts[4] = {{kInvSqrt2, kInvSqrt2},
                     {kInvSqrt2, -kInvSqrt2},
                     {-kInvSqrt2, kInvSqrt2},
                     {-kInvSqrt2, -kInvSqrt2}};
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> axis(0.0, std::sqrt(0.5));
  const double sq = std::sqrt(rho);
  long double acc = 0.0L;
  for (long i = 0; i < samples; ++i) {
    const cd x = pts[gen() & 3];
    const cd r = sq * x + cd(axis(gen), axis(gen));
    double wsum = 0.0;
    cd msum = 0.0;
    for (const cd& s : pts) {
      const double w = std::exp(-std::norm(r - sq * s));
      wsum += w;
      msum += w * s;
    }
    acc += std::norm(x - msum / wsum);
  }
  return double(acc / samples);
}

// Oracle: Monte-Carlo mmse for the sparse Gaussian mixture using its
// two-component posterior in closed form.
double mc_mmse_bg(double rho, double p, long samples, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> axis(0.0, std::sqrt(0.5));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double sq = std::sqrt(rho);
  const double spike_var = 1.0 + rho / p;  // r variance given x nonzero
  long double acc = 0.0L;
  for (long i = 0; i < samples; ++i) {
    cd x = 0.0;
    if (uni(gen) < p) {
      x = cd(axis(gen), axis(gen)) / std::sqrt(p);  // CN(0, 1/p)
    }
    const cd r = sq * x + cd(axis(gen), axis(gen));
    const double f1 = std::exp(-std::norm(r) / spike_var) / spike_var;
    const double f0 = std::exp(-std::norm(r));
    const double q = p * f1 / (p * f1 + (1.0 - p) * f0);
    const cd m = q * (sq / p) / (rho / p + 1.0) * r;
    acc += std::norm(x - m);
  }
  return double(acc / samples);
}

// Oracle: central finite difference of the mutual information.
// Five-point stencil at quadrature order 80: truncation and quadrature error
// both sit well below the checked tolerance.
double fd_mi_derivative(const Prior& prior, double rho) {
  const double h = 1e-3 * std::max(rho, 1.0);
  auto mi = [&](double r) { return mutual_information(prior, r, 80); };
  return (-mi(rho + 2 * h) + 8 * mi(rho + h) - 8 * mi(rho - h) + mi(rho - 2 * h)) / (12.0 * h);
}

}  // namespace

TEST_SUITE_BEGIN("prior");

TEST_CASE("posterior mean: symmetric constellation at rho 0 is zero") {
  const Prior q = qpsk_prior();
  CHECK(std::abs(posterior_mean(q, cd(1.3, -0.4), 0.0)) < 1e-15);
  CHECK(std::abs(posterior_mean(bpsk_prior(), cd(0.9, 0.1), 0.0)) < 1e-15);
}

TEST_CASE("posterior mean: gaussian prior is the linear estimator") {
  const Prior g = gaussian_prior();
  for (double rho : {0.25, 1.0, 9.0}) {
    const cd r(0.7, -1.1);
    const cd want = std::sqrt(rho) / (1.0 + rho) * r;
    CHECK(std::abs(posterior_mean(g, r, rho) - want) < 1e-14);
  }
}

TEST_CASE("posterior mean: high snr locks onto the sent point") {
  const Prior q = qpsk_prior();
  const double rho = 1e4;
  for (const cd& s : q.points) {
    CHECK(std::abs(posterior_mean(q, std::sqrt(rho) * s, rho) - s) < 1e-3);
  }
}

TEST_CASE("posterior mean: matches direct weight evaluation") {
  const Prior q = qpsk_prior();
  const double rho = 1.7;
  const double sq = std::sqrt(rho);
  for (const cd r : {cd(0.3, -0.8), cd(-1.2, 0.05), cd(2.0, 2.0)}) {
    double wsum = 0.0;
    cd msum = 0.0;
    for (size_t k = 0; k < q.points.size(); ++k) {
      const double w = q.probs[k] * std::exp(-std::norm(r - sq * q.points[k]));
      wsum += w;
      msum += w * q.points[k];
    }
    CHECK(std::abs(posterior_mean(q, r, rho) - msum / wsum) < 1e-13);
  }
}

TEST_CASE("mmse: unit prior variance at rho 0") {
  CHECK(std::abs(mmse(qpsk_prior(), 0.0) - 1.0) < 1e-12);
  CHECK(std::abs(mmse(bpsk_prior(), 0.0) - 1.0) < 1e-12);
  CHECK(std::abs(mmse(gaussian_prior(), 0.0) - 1.0) < 1e-15);
  CHECK(std::abs(mmse(bernoulli_gaussian_prior(0.3), 0.0) - 1.0) < 1e-12);
}

TEST_CASE("mmse: gaussian closed form 1/(1+rho)") {
  for (double rho : {0.5, 1.0, 4.0, 30.0}) {
    CHECK(std::abs(mmse(gaussian_prior(), rho) - 1.0 / (1.0 + rho)) < 1e-15);
  }
}

TEST_CASE("mmse: qpsk at rho 1 matches the Monte-Carlo oracle") {
  const double oracle = mc_mmse_qpsk(1.0, 10000000L, 42);
  CHECK(std::abs(oracle - 0.4496102852) < 1e-9);  // frozen oracle output
  const double prod = mmse(qpsk_prior(), 1.0);
  CHECK(std::abs(prod - 0.449599509128) < 1e-10);  // frozen quadrature value
  CHECK(std::abs(prod - oracle) < 1e-4);
}

TEST_CASE("mmse: sparse gaussian matches the mixture oracle") {
  const double p = 0.3;
  const double rho = 2.0;
  const double oracle = mc_mmse_bg(rho, p, 2000000L, 11);
  const double prod = mmse(bernoulli_gaussian_prior(p), rho);
  CHECK(std::abs(prod - oracle) < 4e-3);  // ~4 sigma of the oracle
}

TEST_CASE("mmse: strictly decreasing in rho") {
  for (const Prior& prior : {qpsk_prior(), bpsk_prior(), bernoulli_gaussian_prior(0.25)}) {
    double prev = mmse(prior, 0.0);
    for (int i = 1; i <= 100; ++i) {
      const double cur = mmse(prior, 0.12 * i);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("i-mmse: dI/drho equals mmse to 1e-5") {
  for (const Prior& prior :
       {qpsk_prior(), bpsk_prior(), gaussian_prior(), bernoulli_gaussian_prior(0.25)}) {
    for (double rho : {0.1, 1.0, 10.0}) {
      CHECK(std::abs(fd_mi_derivative(prior, rho) - mmse(prior, rho, 80)) < 1e-5);
    }
  }
}

TEST_CASE("mutual information: zero at rho 0") {
  CHECK(std::abs(mutual_information(qpsk_prior(), 0.0)) < 1e-12);
  CHECK(std::abs(mutual_information(gaussian_prior(), 0.0)) < 1e-15);
  CHECK(std::abs(mutual_information(bernoulli_gaussian_prior(0.5), 0.0)) < 1e-12);
}

TEST_CASE("mutual information: qpsk saturates at ln 4") {
  CHECK(std::abs(mutual_information(qpsk_prior(), 1e4) - std::log(4.0)) < 1e-3);
}

TEST_CASE("mutual information: gaussian closed form ln(1+rho)") {
  for (double rho : {0.3, 1.0, 10.0}) {
    CHECK(std::abs(mutual_information(gaussian_prior(), rho) - std::log1p(rho)) < 1e-14);
  }
}

TEST_CASE("mmse integral over all rho equals the constellation entropy") {
  // Tail beyond rho = 80 is below 1e-15 for QPSK.
  const Prior q = qpsk_prior();
  const double integral =
      quad::integrate([&](double rho) { return mmse(q, rho); }, 0.0, 80.0, 1e-6);
  CHECK(std::abs(integral - std::log(4.0)) < 1e-3);
}

TEST_CASE("prior entropy") {
  CHECK(std::abs(prior_entropy(qpsk_prior()) - std::log(4.0)) < 1e-14);
  CHECK(std::abs(prior_entropy(bpsk_prior()) - std::log(2.0)) < 1e-14);
  CHECK(std::isinf(prior_entropy(gaussian_prior())));
}

TEST_CASE("hard decision: nearest constellation point") {
  const Prior q = qpsk_prior();
  CHECK(std::abs(hard_decision(q, cd(0.2, 0.9)) - cd(kInvSqrt2, kInvSqrt2)) < 1e-15);
  CHECK(std::abs(hard_decision(q, cd(-3.0, 0.01)) - cd(-kInvSqrt2, kInvSqrt2)) < 1e-15);
  CHECK_THROWS_AS(hard_decision(gaussian_prior(), cd(0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("separable fast path agrees with the generic discrete path") {
  const Prior fast = qpsk_prior();
  const Prior generic = discrete_prior(fast.points, fast.probs);
  REQUIRE(fast.separable);
  REQUIRE_FALSE(generic.separable);
  for (double rho : {0.2, 1.0, 5.0}) {
    CHECK(std::abs(mmse(fast, rho) - mmse(generic, rho)) < 1e-12);
    CHECK(std::abs(mutual_information(fast, rho) - mutual_information(generic, rho)) < 1e-12);
    const cd r(0.4, -1.2);
    CHECK(std::abs(posterior_mean(fast, r, rho) - posterior_mean(generic, r, rho)) < 1e-12);
  }
}

TEST_CASE("posterior variance averages to the mmse") {
  const Prior q = qpsk_prior();
  const double rho = 1.5;
  auto gen = rng::make_engine(5);
  const double sq = std::sqrt(rho);
  double acc = 0.0;
  const long k = 200000;
  for (long i = 0; i < k; ++i) {
    const cd x = sample_prior(q, gen);
    const cd r = sq * x + rng::standard_cgauss(gen);
    acc += posterior_stat(q, r, rho).variance;
  }
  CHECK(acc / k == doctest::Approx(mmse(q, rho)).epsilon(5e-3));
}

TEST_CASE("parse_prior: built-ins and errors") {
  CHECK(parse_prior("qpsk").name == "qpsk");
  CHECK(parse_prior("bpsk").points.size() == 2);
  CHECK(parse_prior("gaussian").kind == Prior::Kind::gaussian);
  const Prior bg = parse_prior("bernoulli-gaussian:0.25");
  CHECK(bg.kind == Prior::Kind::bernoulli_gaussian);
  CHECK(bg.sparsity == doctest::Approx(0.25));
  CHECK_THROWS_AS(parse_prior("16qam"), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli_gaussian_prior(0.0), std::invalid_argument);
}

TEST_CASE("constellation csv round trip") {
  const std::string path = (std::filesystem::temp_directory_path() / "prior_rt.csv").string();
  {
    std::ofstream out(path);
    out << std::setprecision(17);
    out << "# re,im,prob\n";
    const double a = kInvSqrt2;
    out << a << "," << a << ",0.25\n" << a << "," << -a << ",0.25\n";
    out << -a << "," << a << ",0.25\n" << -a << "," << -a << ",0.25\n";
  }
  const Prior p = parse_prior(path);
  REQUIRE(p.points.size() == 4);
  for (double rho : {0.5, 2.0}) {
    CHECK(std::abs(mmse(p, rho) - mmse(qpsk_prior(), rho)) < 1e-12);
  }
  std::remove(path.c_str());
}

TEST_CASE("validate: rejects unnormalized constellations") {
  CHECK_THROWS_AS(discrete_prior({cd(1.5, 0.0), cd(-1.5, 0.0)}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(discrete_prior({cd(1.0, 0.0), cd(-1.0, 0.0)}, {0.7, 0.7}),
                  std::invalid_argument);
  CHECK_THROWS_AS(discrete_prior({cd(1.0, 0.0)}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("sample_prior: unit power and uniform symbol frequencies") {
  auto gen = rng::make_engine(9);
  const Prior q = qpsk_prior();
  std::vector<int> counts(4, 0);
  const int k = 100000;
  for (int i = 0; i < k; ++i) {
    const cd x = sample_prior(q, gen);
    CHECK(std::abs(std::abs(x) - 1.0) < 1e-12);
    for (size_t j = 0; j < q.points.size(); ++j) {
      if (std::abs(x - q.points[j]) < 1e-12) {
        ++counts[j];
      }
    }
  }
  for (int c : counts) {
    CHECK(c > 24000);
    CHECK(c < 26000);
  }

  for (const Prior& prior : {gaussian_prior(), bernoulli_gaussian_prior(0.3)}) {
    double power = 0.0;
    for (int i = 0; i < k; ++i) {
      power += std::norm(sample_prior(prior, gen));
    }
    CHECK(power / k == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_SUITE_END();
