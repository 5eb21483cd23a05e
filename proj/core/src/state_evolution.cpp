#include "luislab/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "luislab/csvio.hpp"

namespace luis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Geometric bisection of a monotone function over positive arguments.
// Converges uniformly in relative terms even when the bracket spans many
// decades. `below` must hold at lo and fail at hi.
double bisect_geometric(const std::function<bool(double)>& below, double lo, double hi) {
  for (int it = 0; it < 300 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (below(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

SpectrumSe::SpectrumSe(const ChannelSpectrum& spectrum, double snr) {
  spectrum.validate();
  if (!(snr >= 0.0) || !std::isfinite(snr)) {
    throw std::invalid_argument("SpectrumSe: snr must be finite and nonnegative");
  }
  lam_ = spectrum.singular_values.array().square();
  n_ = spectrum.cols;
  snr_ = snr;
}

double SpectrumSe::mass_below(double v) const {
  double acc = static_cast<double>(n_ - lam_.size());
  for (int i = 0; i < lam_.size(); ++i) {
    acc += 1.0 / (snr_ * lam_[i] * v + 1.0);
  }
  return acc / n_;
}

double SpectrumSe::mass_above(double v) const {
  double acc = 0.0;
  for (int i = 0; i < lam_.size(); ++i) {
    const double t = snr_ * lam_[i] * v;
    acc += t / (t + 1.0);
  }
  return acc / n_;
}

double SpectrumSe::gamma_hat(double v) const {
  if (!(v > 0.0)) {
    throw std::domain_error("gamma_hat: v must be positive");
  }
  return v * mass_below(v);
}

double SpectrumSe::gamma_hat_prime(double v) const {
  if (!(v > 0.0)) {
    throw std::domain_error("gamma_hat_prime: v must be positive");
  }
  double acc = static_cast<double>(n_ - lam_.size());
  for (int i = 0; i < lam_.size(); ++i) {
    const double den = snr_ * lam_[i] * v + 1.0;
    acc += 1.0 / (den * den);
  }
  return acc / n_;
}

double SpectrumSe::gamma_se(double v) const {
  if (!(v > 0.0)) {
    throw std::domain_error("gamma_se: v must be positive");
  }
  // Equals 1/gamma_hat(v) - 1/v, written without the cancellation at small v.
  return mass_above(v) / (v * mass_below(v));
}

double SpectrumSe::gs_coefficient(double v) const {
  if (!(v > 0.0)) {
    throw std::domain_error("gs_coefficient: v must be positive");
  }
  return mass_below(v);
}

double SpectrumSe::gs_complement(double v) const {
  if (!(v > 0.0)) {
    throw std::domain_error("gs_complement: v must be positive");
  }
  return mass_above(v);
}

double SpectrumSe::gamma_hat_sup() const {
  if (snr_ == 0.0) {
    return kInf;
  }
  double acc = static_cast<double>(n_ - lam_.size());
  for (int i = 0; i < lam_.size(); ++i) {
    if (lam_[i] <= 0.0) {
      return kInf;  // zero modes make gamma_hat unbounded
    }
  }
  if (acc > 0.0) {
    return kInf;
  }
  double sup = 0.0;
  for (int i = 0; i < lam_.size(); ++i) {
    sup += 1.0 / (snr_ * lam_[i]);
  }
  return sup / n_;
}

double SpectrumSe::rho_floor() const {
  const double sup = gamma_hat_sup();
  return std::isfinite(sup) ? 1.0 / sup : 0.0;
}

double SpectrumSe::gamma_hat_inverse(double v) const {
  if (!(v > 0.0)) {
    throw std::domain_error("gamma_hat_inverse: v must be positive");
  }
  if (snr_ == 0.0) {
    return v;  // gamma_hat is the identity
  }
  const double sup = gamma_hat_sup();
  if (v >= sup) {
    throw std::domain_error("gamma_hat_inverse: v at or above the supremum of gamma_hat");
  }
  double hi = std::max(v, 1e-300);
  while (gamma_hat(hi) < v) {
    hi *= 2.0;
    if (hi > 1e300) {
      throw std::runtime_error("gamma_hat_inverse: bracket search diverged");
    }
  }
  if (hi == v) {
    return v;  // gamma_hat(v) == v can only happen at roundoff
  }
  return bisect_geometric([&](double u) { return gamma_hat(u) < v; }, v, hi);
}

double SpectrumSe::gamma_se_inverse(double rho) const {
  if (snr_ == 0.0) {
    throw std::domain_error("gamma_se_inverse: gamma_se is identically zero at snr = 0");
  }
  if (!(rho > rho_floor()) || !(rho < snr_)) {
    throw std::domain_error("gamma_se_inverse: rho outside (rho_floor, snr)");
  }
  double lo = 1e-300;
  if (gamma_se(lo) <= rho) {
    return lo;  // rho indistinguishable from snr at double precision
  }
  double hi = 1.0;
  while (gamma_se(hi) > rho) {
    hi *= 2.0;
    if (hi > 1e300) {
      throw std::runtime_error("gamma_se_inverse: bracket search diverged");
    }
  }
  return bisect_geometric([&](double u) { return gamma_se(u) > rho; }, lo, hi);
}

double SpectrumSe::eta(double v) const { return gamma_se(gamma_hat_inverse(v)); }

double SpectrumSe::eta_inverse(double rho) const { return gamma_hat(gamma_se_inverse(rho)); }

PhiHat phi_hat_of(const Prior& prior) {
  prior.validate();
  return [prior](double rho) { return mmse(prior, rho); };
}

FixedPoint solve_fixed_point(const ChannelSpectrum& spectrum, double snr, const Prior& prior) {
  return solve_fixed_point(spectrum, snr, phi_hat_of(prior));
}

FixedPoint solve_fixed_point(const ChannelSpectrum& spectrum, double snr, const PhiHat& phi_hat) {
  FixedPoint fp;
  if (snr == 0.0) {
    fp.rho_star = 0.0;
    fp.v_star = phi_hat(0.0);
    fp.converged = true;
    return fp;
  }
  const SpectrumSe se(spectrum, snr);

  // Alternate in the pre-LE error variance u; both maps are monotone, so the
  // iterates decrease toward the largest fixed point.
  double u = 1.0;
  bool met_tol = false;
  int iters = 0;
  for (; iters < 10000; ++iters) {
    const double rho = se.gamma_se(u);
    const double v_post = phi_hat(rho);
    const double denom = 1.0 - rho * v_post;
    if (denom <= 0.0) {
      throw std::runtime_error("solve_fixed_point: nonlinear stage variance at or above 1/rho");
    }
    const double u_next = v_post / denom;
    if (std::abs(u_next - u) <= 1e-12 * u) {
      u = u_next;
      met_tol = true;
      ++iters;
      break;
    }
    u = u_next;
  }
  fp.rho_star = se.gamma_se(u);
  fp.v_star = phi_hat(fp.rho_star);
  fp.iterations = iters;

  // Uniqueness scan: interior fixed points are the sign changes of
  // phi_hat(rho) - v_linear(rho) over the strip rho in (rho_floor, snr), the
  // only range the linear-stage curve reaches; below rho_floor no crossing
  // can exist. Zero sign changes means the single crossing sits on a
  // boundary segment (e.g. the vertical rho = snr edge of a flat spectrum).
  const int kGrid = 1000;
  const double lo = std::max(1e-4 * snr, se.rho_floor() * (1.0 + 1e-9));
  const double hi = snr * (1.0 - 1e-9);
  int changes = 0;
  int last_sign = 0;
  for (int i = 0; i < kGrid && lo < hi; ++i) {
    const double r = lo * std::pow(hi / lo, static_cast<double>(i) / (kGrid - 1));
    const double d = phi_hat(r) - se.eta_inverse(r);
    const int s = (d > 0.0) - (d < 0.0);
    if (s != 0) {
      if (last_sign != 0 && s != last_sign) {
        ++changes;
      }
      last_sign = s;
    }
  }
  fp.unique = changes <= 1;
  fp.converged = met_tol;
  return fp;
}

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::eta_inverse:
      return "eta_inverse";
    case CurveKind::constellation_mmse:
      return "constellation_mmse";
    case CurveKind::code_mmse:
      return "code_mmse";
    case CurveKind::min_envelope:
      return "min_envelope";
  }
  throw std::logic_error("to_string: unknown curve kind");
}

namespace {

CurveKind curve_kind_from(const std::string& s) {
  if (s == "eta_inverse") return CurveKind::eta_inverse;
  if (s == "constellation_mmse") return CurveKind::constellation_mmse;
  if (s == "code_mmse") return CurveKind::code_mmse;
  if (s == "min_envelope") return CurveKind::min_envelope;
  throw std::invalid_argument("unknown curve kind '" + s + "'");
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) {
    throw std::invalid_argument("sample_curve: empty grid");
  }
  if (grid.front() < 0.0) {
    throw std::invalid_argument("sample_curve: grid must be nonnegative");
  }
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("sample_curve: grid must be strictly increasing");
    }
  }
}

}  // namespace

void SeCurve::validate() const {
  if (rho.size() != v.size() || rho.empty()) {
    throw std::invalid_argument("SeCurve: rho and v must be nonempty and equal length");
  }
  for (size_t i = 0; i < rho.size(); ++i) {
    if (!std::isfinite(rho[i]) || rho[i] < 0.0) {
      throw std::invalid_argument("SeCurve: rho values must be finite and nonnegative");
    }
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw std::invalid_argument("SeCurve: v values must be positive and finite");
    }
    if (i > 0 && !(rho[i] > rho[i - 1])) {
      throw std::invalid_argument("SeCurve: rho must be strictly increasing");
    }
    if (i > 0 && v[i] > v[i - 1]) {
      throw std::invalid_argument("SeCurve: v must be nonincreasing");
    }
  }
}

SeCurve sample_curve(CurveKind kind, const ChannelSpectrum& spectrum, double snr,
                     const Prior& prior, const std::vector<double>& grid) {
  check_grid(grid);
  SeCurve curve;
  curve.kind = kind;
  switch (kind) {
    case CurveKind::constellation_mmse: {
      for (double r : grid) {
        curve.rho.push_back(r);
        curve.v.push_back(std::max(mmse(prior, r), kCurveFloor));
      }
      break;
    }
    case CurveKind::eta_inverse:
    case CurveKind::min_envelope: {
      if (grid.back() > snr * (1.0 + 1e-12)) {
        throw std::invalid_argument("sample_curve: grid exceeds snr for a linear-stage curve");
      }
      const SpectrumSe se(spectrum, snr);
      const double floor = se.rho_floor();
      for (double r : grid) {
        const bool invertible =
            snr > 0.0 && r > floor * (1.0 + 1e-12) && r < snr * (1.0 - 1e-15);
        double value = kInf;
        if (invertible) {
          value = se.eta_inverse(r);
        }
        if (kind == CurveKind::min_envelope) {
          value = std::min(value, mmse(prior, r));
        }
        if (!std::isfinite(value)) {
          continue;  // no finite linear-stage point at this rho
        }
        curve.rho.push_back(r);
        curve.v.push_back(std::max(value, kCurveFloor));
      }
      // Terminal sample: the linear stage reaches zero error exactly at snr.
      if (curve.rho.empty() || curve.rho.back() < snr) {
        curve.rho.push_back(snr);
        curve.v.push_back(kCurveFloor);
      }
      break;
    }
    case CurveKind::code_mmse:
      throw std::invalid_argument("sample_curve: code_mmse requires measured samples");
  }
  curve.validate();
  return curve;
}

SeCurve curve_from_samples(const std::vector<double>& rho, const std::vector<double>& v) {
  if (rho.size() != v.size() || rho.empty()) {
    throw std::invalid_argument("curve_from_samples: rho and v must be nonempty, equal length");
  }
  SeCurve curve;
  curve.kind = CurveKind::code_mmse;
  curve.rho = rho;
  curve.v = v;
  double running = kInf;
  for (double& value : curve.v) {
    running = std::min(running, std::max(value, kCurveFloor));
    value = running;
  }
  curve.validate();
  return curve;
}

void write_curve_csv(const std::string& path, const SeCurve& curve) {
  curve.validate();
  std::vector<std::string> lines;
  lines.push_back("# luislab curve v" + std::string(csv::kSchemaVersion));
  lines.push_back("# kind=" + to_string(curve.kind));
  lines.push_back("rho,v");
  for (size_t i = 0; i < curve.rho.size(); ++i) {
    lines.push_back(csv::format_double(curve.rho[i]) + "," + csv::format_double(curve.v[i]));
  }
  csv::write_lines(path, lines);
}

SeCurve read_curve_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  SeCurve curve;
  bool have_kind = false;
  for (const std::string& comment : table.comments) {
    const auto pos = comment.find("kind=");
    if (pos != std::string::npos) {
      curve.kind = curve_kind_from(comment.substr(pos + 5));
      have_kind = true;
    }
  }
  if (!have_kind) {
    throw std::invalid_argument("read_curve_csv: missing '# kind=' comment in " + path);
  }
  for (const auto& row : table.rows) {
    if (row.size() != 2) {
      throw std::invalid_argument("read_curve_csv: expected two columns in " + path);
    }
    if (row[0] == "rho") {
      continue;  // column header
    }
    curve.rho.push_back(std::stod(row[0]));
    curve.v.push_back(std::stod(row[1]));
  }
  curve.validate();
  return curve;
}

double TabulatedPhiHat::eval(double r) const {
  if (rho.size() < 2 || rho.size() != v.size()) {
    throw std::logic_error("TabulatedPhiHat: need at least two samples");
  }
  if (r < rho.front() || r > rho.back()) {
    throw std::domain_error("TabulatedPhiHat: rho outside the sampled range");
  }
  const auto it = std::upper_bound(rho.begin(), rho.end(), r);
  const size_t j = std::min<size_t>(rho.size() - 1, std::distance(rho.begin(), it));
  const size_t i = j - 1;
  const double l0 = std::log(std::max(v[i], kCurveFloor));
  const double l1 = std::log(std::max(v[j], kCurveFloor));
  const double w = (r - rho[i]) / (rho[j] - rho[i]);
  return std::exp(l0 + (l1 - l0) * w);
}

namespace {

SeTrace run_trace(const ChannelSpectrum& spectrum, double snr, int t_max,
                  const std::function<double(double, SeTrace&)>& phi_hat) {
  if (t_max < 1) {
    throw std::invalid_argument("trace_se: t_max must be positive");
  }
  const SpectrumSe se(spectrum, snr);
  SeTrace trace;
  trace.v.reserve(t_max + 1);
  trace.rho.reserve(t_max);
  double u = 1.0;
  trace.v.push_back(u);
  for (int t = 0; t < t_max; ++t) {
    const double rho = se.gamma_se(u);
    trace.rho.push_back(rho);
    const double v_post = phi_hat(rho, trace);
    const double denom = 1.0 - rho * v_post;
    if (denom <= 0.0) {
      trace.clamped = true;  // hold the state instead of stepping outside the model
    } else {
      u = v_post / denom;
    }
    trace.v.push_back(u);
  }
  return trace;
}

}  // namespace

SeTrace trace_se(const ChannelSpectrum& spectrum, double snr, const Prior& prior, int t_max) {
  const PhiHat phi = phi_hat_of(prior);
  return run_trace(spectrum, snr, t_max, [&](double rho, SeTrace&) { return phi(rho); });
}

SeTrace trace_se(const ChannelSpectrum& spectrum, double snr, const TabulatedPhiHat& code_curve,
                 const Prior& constellation, int t_max) {
  if (code_curve.rho.size() < 2) {
    throw std::invalid_argument("trace_se: code curve needs at least two samples");
  }
  const PhiHat fallback = phi_hat_of(constellation);
  return run_trace(spectrum, snr, t_max, [&](double rho, SeTrace& trace) {
    if (rho > code_curve.rho_max() || rho < code_curve.rho.front()) {
      trace.extrapolated = true;
      return fallback(rho);
    }
    return code_curve.eval(rho);
  });
}

}  // namespace luis
