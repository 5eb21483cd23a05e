#include "luislab/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "luislab/csvio.hpp"
#include "luislab/quadrature.hpp"
#include "luislab/rng.hpp"

namespace luis {

namespace {

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log sum_k exp(l_k), stabilized.
double log_sum_exp(const std::vector<double>& l) {
  const double m = *std::max_element(l.begin(), l.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : l) acc += std::exp(v - m);
  return m + std::log(acc);
}

struct AxisPosterior {
  double mean;
  double second_moment;
};

AxisPosterior axis_posterior(const std::vector<double>& pts, const std::vector<double>& probs,
                             double r, double sqrt_rho) {
  const size_t k = pts.size();
  if (k == 1) return {pts[0], pts[0] * pts[0]};
  double max_l = -std::numeric_limits<double>::infinity();
  std::vector<double> l(k);
  for (size_t i = 0; i < k; ++i) {
    const double d = r - sqrt_rho * pts[i];
    l[i] = std::log(probs[i]) - d * d;
    max_l = std::max(max_l, l[i]);
  }
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const double w = std::exp(l[i] - max_l);
    z += w;
    m1 += w * pts[i];
    m2 += w * pts[i] * pts[i];
  }
  return {m1 / z, m2 / z};
}

double axis_mmse(const std::vector<double>& pts, const std::vector<double>& probs, double rho,
                 int order) {
  if (pts.size() == 1) return 0.0;
  const auto& rule = quad::gauss_hermite(order);
  const double sr = std::sqrt(rho);
  double acc = 0.0;
  for (size_t j = 0; j < pts.size(); ++j) {
    for (size_t a = 0; a < rule.nodes.size(); ++a) {
      const double r = sr * pts[j] + rule.nodes[a];
      const double e = pts[j] - axis_posterior(pts, probs, r, sr).mean;
      acc += probs[j] * rule.weights[a] * e * e;
    }
  }
  return acc;
}

double axis_mutual_information(const std::vector<double>& pts, const std::vector<double>& probs,
                               double rho, int order) {
  if (pts.size() == 1) return 0.0;
  const auto& rule = quad::gauss_hermite(order);
  const double sr = std::sqrt(rho);
  double acc = 0.0;
  std::vector<double> l(pts.size());
  for (size_t j = 0; j < pts.size(); ++j) {
    for (size_t a = 0; a < rule.nodes.size(); ++a) {
      const double z = rule.nodes[a];
      for (size_t k = 0; k < pts.size(); ++k) {
        const double d = sr * (pts[j] - pts[k]) + z;
        l[k] = std::log(probs[k]) - d * d;
      }
      acc += probs[j] * rule.weights[a] * log_sum_exp(l);
    }
  }
  return -0.5 - acc;
}

struct ComplexPosterior {
  std::complex<double> mean;
  double second_moment;
};

ComplexPosterior complex_posterior(const Prior& prior, std::complex<double> r, double sqrt_rho) {
  const size_t k = prior.points.size();
  std::vector<double> l(k);
  double max_l = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < k; ++i) {
    const double d = std::norm(r - sqrt_rho * prior.points[i]);
    l[i] = std::log(prior.probs[i]) - d;
    max_l = std::max(max_l, l[i]);
  }
  double z = 0.0, m2 = 0.0;
  std::complex<double> m1 = 0.0;
  for (size_t i = 0; i < k; ++i) {
    const double w = std::exp(l[i] - max_l);
    z += w;
    m1 += w * prior.points[i];
    m2 += w * std::norm(prior.points[i]);
  }
  return {m1 / z, m2 / z};
}

double discrete_mmse_2d(const Prior& prior, double rho, int order) {
  const auto& rule = quad::gauss_hermite(order);
  const double sr = std::sqrt(rho);
  double acc = 0.0;
  for (size_t j = 0; j < prior.points.size(); ++j) {
    for (size_t a = 0; a < rule.nodes.size(); ++a) {
      for (size_t b = 0; b < rule.nodes.size(); ++b) {
        const std::complex<double> z(rule.nodes[a], rule.nodes[b]);
        const std::complex<double> r = sr * prior.points[j] + z;
        const double e = std::norm(prior.points[j] - complex_posterior(prior, r, sr).mean);
        acc += prior.probs[j] * rule.weights[a] * rule.weights[b] * e;
      }
    }
  }
  return acc;
}

double discrete_mi_2d(const Prior& prior, double rho, int order) {
  const auto& rule = quad::gauss_hermite(order);
  const double sr = std::sqrt(rho);
  const size_t k = prior.points.size();
  std::vector<double> l(k);
  double acc = 0.0;
  for (size_t j = 0; j < k; ++j) {
    for (size_t a = 0; a < rule.nodes.size(); ++a) {
      for (size_t b = 0; b < rule.nodes.size(); ++b) {
        const std::complex<double> z(rule.nodes[a], rule.nodes[b]);
        for (size_t i = 0; i < k; ++i) {
          l[i] = std::log(prior.probs[i]) - std::norm(sr * (prior.points[j] - prior.points[i]) + z);
        }
        acc += prior.probs[j] * rule.weights[a] * rule.weights[b] * log_sum_exp(l);
      }
    }
  }
  return -1.0 - acc;
}

// Bernoulli-Gaussian helpers. Slab variance is 1/p so the prior has unit
// power; sigma2 = 1 + rho/p is the marginal variance of r under the slab.
struct BgPieces {
  double sigma2;      // slab observation variance
  double shrink;      // slab posterior mean coefficient on r
  double slab_var;    // slab posterior variance
};

BgPieces bg_pieces(double p, double rho) {
  const double s2 = 1.0 / p;
  BgPieces out;
  out.sigma2 = 1.0 + rho * s2;
  out.shrink = std::sqrt(rho) * s2 / out.sigma2;
  out.slab_var = s2 / out.sigma2;
  return out;
}

double bg_slab_weight(double p, double rho, double u /* = |r|^2 */) {
  if (p >= 1.0) return 1.0;
  const BgPieces g = bg_pieces(p, rho);
  const double logit =
      std::log(p / (1.0 - p)) - std::log(g.sigma2) + u * (1.0 - 1.0 / g.sigma2);
  return logistic(logit);
}

// E_{u ~ Exp(scale)}[f(u)] by adaptive quadrature after u = scale * tau.
double exp_average(const std::function<double(double)>& f, double scale, double tol) {
  return quad::integrate([&](double tau) { return f(scale * tau) * std::exp(-tau); }, 0.0, 60.0,
                         tol);
}

double bg_mmse(double p, double rho, double tol = 1e-10) {
  if (rho == 0.0) return 1.0;
  const BgPieces g = bg_pieces(p, rho);
  auto w2u = [&](double u) {
    const double w = bg_slab_weight(p, rho, u);
    return w * w * u;
  };
  const double e = (1.0 - p) * exp_average(w2u, 1.0, tol) + p * exp_average(w2u, g.sigma2, tol);
  return 1.0 - g.shrink * g.shrink * e;
}

double bg_mutual_information(double p, double rho, double tol = 1e-10) {
  if (rho == 0.0) return 0.0;
  const BgPieces g = bg_pieces(p, rho);
  auto log_q = [&](double u) {
    const double l0 = std::log1p(-std::min(p, 1.0 - 1e-300)) - u;
    const double ls = std::log(p) - std::log(g.sigma2) - u / g.sigma2;
    const double m = std::max(l0, ls);
    return m + std::log(std::exp(l0 - m) + std::exp(ls - m));
  };
  if (p >= 1.0) return std::log(g.sigma2);
  const double h =
      -((1.0 - p) * exp_average(log_q, 1.0, tol) + p * exp_average(log_q, g.sigma2, tol));
  return h - 1.0;
}

}  // namespace

void Prior::validate() const {
  switch (kind) {
    case Kind::gaussian:
      return;
    case Kind::bernoulli_gaussian:
      if (!(sparsity > 0.0) || sparsity > 1.0)
        throw std::invalid_argument("prior: sparsity must be in (0, 1]");
      return;
    case Kind::discrete:
      break;
  }
  if (points.empty() || points.size() != probs.size())
    throw std::invalid_argument("prior: points/probs size mismatch");
  double psum = 0.0, power = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    if (!(probs[i] > 0.0)) throw std::invalid_argument("prior: probabilities must be positive");
    psum += probs[i];
    power += probs[i] * std::norm(points[i]);
  }
  if (std::abs(psum - 1.0) > 1e-12)
    throw std::invalid_argument("prior: probabilities must sum to 1");
  if (std::abs(power - 1.0) > 1e-12)
    throw std::invalid_argument("prior: constellation power must equal 1");
}

Prior qpsk_prior() {
  const double a = 1.0 / std::sqrt(2.0);
  Prior p;
  p.kind = Prior::Kind::discrete;
  p.name = "qpsk";
  // Gray order: index = (bit0, bit1), bit value 0 maps to +a on its axis.
  p.points = {{a, a}, {a, -a}, {-a, a}, {-a, -a}};
  p.probs = {0.25, 0.25, 0.25, 0.25};
  p.separable = true;
  p.axis_re_points = {a, -a};
  p.axis_re_probs = {0.5, 0.5};
  p.axis_im_points = {a, -a};
  p.axis_im_probs = {0.5, 0.5};
  p.validate();
  return p;
}

Prior bpsk_prior() {
  Prior p;
  p.kind = Prior::Kind::discrete;
  p.name = "bpsk";
  p.points = {{1.0, 0.0}, {-1.0, 0.0}};
  p.probs = {0.5, 0.5};
  p.separable = true;
  p.axis_re_points = {1.0, -1.0};
  p.axis_re_probs = {0.5, 0.5};
  p.axis_im_points = {0.0};
  p.axis_im_probs = {1.0};
  p.validate();
  return p;
}

Prior gaussian_prior() {
  Prior p;
  p.kind = Prior::Kind::gaussian;
  p.name = "gaussian";
  return p;
}

Prior bernoulli_gaussian_prior(double sparsity) {
  Prior p;
  p.kind = Prior::Kind::bernoulli_gaussian;
  p.name = "bernoulli-gaussian";
  p.sparsity = sparsity;
  p.validate();
  return p;
}

Prior discrete_prior(std::vector<std::complex<double>> points, std::vector<double> probs,
                     std::string name) {
  Prior p;
  p.kind = Prior::Kind::discrete;
  p.name = std::move(name);
  p.points = std::move(points);
  p.probs = std::move(probs);
  p.validate();
  return p;
}

Prior prior_from_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  std::vector<std::complex<double>> points;
  std::vector<double> probs;
  for (const auto& row : table.rows) {
    if (row.size() != 3)
      throw std::runtime_error("constellation csv: expected rows re,im,prob in " + path);
    points.emplace_back(std::stod(row[0]), std::stod(row[1]));
    probs.push_back(std::stod(row[2]));
  }
  return discrete_prior(std::move(points), std::move(probs), path);
}

Prior parse_prior(const std::string& text) {
  if (text == "qpsk") return qpsk_prior();
  if (text == "bpsk") return bpsk_prior();
  if (text == "gaussian") return gaussian_prior();
  const std::string bg = "bernoulli-gaussian:";
  if (text.rfind(bg, 0) == 0) return bernoulli_gaussian_prior(std::stod(text.substr(bg.size())));
  if (text.find('/') != std::string::npos || text.find(".csv") != std::string::npos)
    return prior_from_csv(text);
  throw std::invalid_argument("unknown prior: " + text);
}

std::complex<double> posterior_mean(const Prior& prior, std::complex<double> r, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("posterior_mean: rho must be >= 0");
  switch (prior.kind) {
    case Prior::Kind::gaussian:
      return (std::sqrt(rho) / (1.0 + rho)) * r;
    case Prior::Kind::bernoulli_gaussian: {
      const BgPieces g = bg_pieces(prior.sparsity, rho);
      return bg_slab_weight(prior.sparsity, rho, std::norm(r)) * g.shrink * r;
    }
    case Prior::Kind::discrete:
      return complex_posterior(prior, r, std::sqrt(rho)).mean;
  }
  throw std::logic_error("posterior_mean: unreachable");
}

PosteriorStat posterior_stat(const Prior& prior, std::complex<double> r, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("posterior_stat: rho must be >= 0");
  switch (prior.kind) {
    case Prior::Kind::gaussian: {
      const std::complex<double> m = (std::sqrt(rho) / (1.0 + rho)) * r;
      return {m, 1.0 / (1.0 + rho)};
    }
    case Prior::Kind::bernoulli_gaussian: {
      const BgPieces g = bg_pieces(prior.sparsity, rho);
      const double w = bg_slab_weight(prior.sparsity, rho, std::norm(r));
      const std::complex<double> slab_mean = g.shrink * r;
      const std::complex<double> m = w * slab_mean;
      const double var = w * g.slab_var + w * (1.0 - w) * std::norm(slab_mean);
      return {m, var};
    }
    case Prior::Kind::discrete: {
      const ComplexPosterior cp = complex_posterior(prior, r, std::sqrt(rho));
      return {cp.mean, cp.second_moment - std::norm(cp.mean)};
    }
  }
  throw std::logic_error("posterior_stat: unreachable");
}

double mmse(const Prior& prior, double rho, int quad_order) {
  if (!(rho >= 0.0)) throw std::invalid_argument("mmse: rho must be >= 0");
  if (quad_order < 30) throw std::invalid_argument("mmse: quadrature order must be >= 30");
  switch (prior.kind) {
    case Prior::Kind::gaussian:
      return 1.0 / (1.0 + rho);
    case Prior::Kind::bernoulli_gaussian:
      return bg_mmse(prior.sparsity, rho);
    case Prior::Kind::discrete:
      if (prior.separable) {
        return axis_mmse(prior.axis_re_points, prior.axis_re_probs, rho, quad_order) +
               axis_mmse(prior.axis_im_points, prior.axis_im_probs, rho, quad_order);
      }
      return discrete_mmse_2d(prior, rho, quad_order);
  }
  throw std::logic_error("mmse: unreachable");
}

double mutual_information(const Prior& prior, double rho, int quad_order) {
  if (!(rho >= 0.0)) throw std::invalid_argument("mutual_information: rho must be >= 0");
  if (quad_order < 30) throw std::invalid_argument("mutual_information: order must be >= 30");
  switch (prior.kind) {
    case Prior::Kind::gaussian:
      return std::log1p(rho);
    case Prior::Kind::bernoulli_gaussian:
      return bg_mutual_information(prior.sparsity, rho);
    case Prior::Kind::discrete:
      if (prior.separable) {
        return axis_mutual_information(prior.axis_re_points, prior.axis_re_probs, rho, quad_order) +
               axis_mutual_information(prior.axis_im_points, prior.axis_im_probs, rho, quad_order);
      }
      return discrete_mi_2d(prior, rho, quad_order);
  }
  throw std::logic_error("mutual_information: unreachable");
}

double prior_entropy(const Prior& prior) {
  if (prior.kind != Prior::Kind::discrete) return std::numeric_limits<double>::infinity();
  double h = 0.0;
  for (double p : prior.probs) h -= p * std::log(p);
  return h;
}

std::complex<double> hard_decision(const Prior& prior, std::complex<double> value) {
  if (prior.kind != Prior::Kind::discrete)
    throw std::invalid_argument("hard_decision: discrete prior required");
  size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < prior.points.size(); ++i) {
    const double d = std::norm(value - prior.points[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return prior.points[best];
}

std::complex<double> sample_prior(const Prior& prior, std::mt19937_64& gen) {
  switch (prior.kind) {
    case Prior::Kind::gaussian:
      return rng::standard_cgauss(gen);
    case Prior::Kind::bernoulli_gaussian: {
      const double u = std::ldexp(static_cast<double>(gen() >> 11), -53);
      if (u >= prior.sparsity) {
        return {0.0, 0.0};
      }
      return rng::standard_cgauss(gen) / std::sqrt(prior.sparsity);
    }
    case Prior::Kind::discrete: {
      // Cumulative walk on one uniform draw; identical across platforms.
      const double u = std::ldexp(static_cast<double>(gen() >> 11), -53);
      double acc = 0.0;
      for (size_t i = 0; i < prior.probs.size(); ++i) {
        acc += prior.probs[i];
        if (u < acc) {
          return prior.points[i];
        }
      }
      return prior.points.back();
    }
  }
  throw std::logic_error("sample_prior: unreachable");
}

}  // namespace luis
