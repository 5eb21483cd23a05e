#include "luislab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "luislab/csvio.hpp"
#include "luislab/quadrature.hpp"
#include "luislab/spectral.hpp"

namespace luis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMatchSlack = 1e-4;  // relative strictness of the tunnel test

FixedPoint require_fixed_point(const ChannelSpectrum& spectrum, double snr, const Prior& prior) {
  const FixedPoint fp = solve_fixed_point(spectrum, snr, prior);
  if (!fp.converged) {
    throw std::runtime_error(fp.unique
                                 ? "state evolution fixed point did not converge"
                                 : "state evolution fixed point is not unique");
  }
  return fp;
}

double mmse_integral(const Prior& prior, double upper) {
  if (upper <= 0.0) {
    return 0.0;
  }
  return quad::integrate([&](double rho) { return mmse(prior, rho); }, 0.0, upper, 1e-8);
}

}  // namespace

double capacity_via_areas(const ChannelSpectrum& spectrum, double snr, const Prior& prior) {
  const FixedPoint fp = require_fixed_point(spectrum, snr, prior);
  const SpectralMeasure measure = SpectralMeasure::from_spectrum(spectrum);
  return mmse_integral(prior, fp.rho_star) + std::log(fp.v_star) +
         log_det_term(measure, snr, fp.rho_star, fp.v_star);
}

ReplicaSolution capacity_via_replica(const ChannelSpectrum& spectrum, double snr,
                                     const Prior& prior) {
  spectrum.validate();
  prior.validate();
  ReplicaSolution sol;
  if (snr == 0.0) {
    sol.v_star = mmse(prior, 0.0);
    return sol;
  }
  const SpectralMeasure measure = SpectralMeasure::from_spectrum(spectrum);

  // Measures without zero eigenvalues bound the R-transform domain; start
  // the alternation inside it. The fixed point itself is always interior.
  double v0 = 1.0;
  if (measure.min_eigenvalue() > 0.0) {
    const double s_min = stieltjes(measure, -1e-300);  // G(0^-), negative
    v0 = std::min(v0, 0.99 * (-s_min) / snr);
  }

  double v = v0;
  bool converged = false;
  for (int it = 0; it < 20000; ++it) {
    const double rho = snr * r_transform(measure, -snr * v);
    const double v_next = 0.5 * (v + mmse(prior, rho));
    sol.iterations = it + 1;
    if (std::abs(v_next - v) <= 1e-10 * std::max(v, 1e-30)) {
      v = v_next;
      converged = true;
      break;
    }
    v = v_next;
  }
  if (!converged) {
    throw std::runtime_error("capacity_via_replica: coupled equations did not converge");
  }
  sol.rho_star = snr * r_transform(measure, -snr * v);
  sol.v_star = v;
  sol.capacity = r_integral(measure, snr * v, 1e-8) + mutual_information(prior, sol.rho_star) -
                 sol.rho_star * v;
  return sol;
}

double oamp_achievable_rate(const ChannelSpectrum& spectrum, double snr, const Prior& prior) {
  const FixedPoint fp = require_fixed_point(spectrum, snr, prior);
  if (snr == 0.0) {
    return 0.0;
  }
  const SpectrumSe se(spectrum, snr);
  const double rho_star = fp.rho_star;
  const double denom = 1.0 - rho_star * fp.v_star;
  if (denom <= 0.0) {
    throw std::runtime_error("oamp_achievable_rate: degenerate fixed point");
  }
  const double u_star = fp.v_star / denom;

  // Region under the inverse linear-stage curve from rho* to snr, written in
  // the curve parameter so vertical segments integrate to zero.
  const double tail = quad::integrate(
      [&](double u) {
        const double uu = std::max(u, 1e-300);
        return (se.gamma_se(uu) - rho_star) * se.gamma_hat_prime(uu);
      },
      0.0, u_star, 1e-8);
  return mmse_integral(prior, rho_star) + tail;
}

AreaReport area_report(const ChannelSpectrum& spectrum, double snr, const Prior& prior) {
  const FixedPoint fp = require_fixed_point(spectrum, snr, prior);
  const SpectralMeasure measure = SpectralMeasure::from_spectrum(spectrum);

  AreaReport report;
  report.rho_star = fp.rho_star;
  report.v_star = fp.v_star;

  report.capacity_se = mmse_integral(prior, fp.rho_star) + std::log(fp.v_star) +
                       log_det_term(measure, snr, fp.rho_star, fp.v_star);
  report.capacity_replica = capacity_via_replica(spectrum, snr, prior).capacity;
  report.cascading_rate = mutual_information(prior, fp.rho_star);
  report.gaussian_capacity = luis::gaussian_capacity(measure, snr);
  report.siso_capacity = mutual_information(prior, snr);

  const double entropy = prior_entropy(prior);
  report.aho_infinite = !std::isfinite(entropy);

  auto& a = report.areas;
  a["ADGO"] = report.capacity_se;
  a["BDEO"] = fp.rho_star * fp.v_star;
  a["AHO"] = entropy;
  a["ACGO"] = report.gaussian_capacity;
  a["ACD"] = report.gaussian_capacity - report.capacity_se;
  a["ADEO"] = report.cascading_rate;
  a["DGE"] = report.capacity_se - report.cascading_rate;
  a["AFGO"] = report.siso_capacity;
  a["DFG"] = report.siso_capacity - report.capacity_se;
  a["FHG"] = report.aho_infinite ? kInf : entropy - report.siso_capacity;
  a["BDGO"] = r_integral(measure, snr * fp.v_star, 1e-8);
  return report;
}

namespace {

const std::vector<std::string>& area_keys() {
  static const std::vector<std::string> keys = {"ADGO", "BDEO", "AHO",  "ACGO", "ACD", "ADEO",
                                                "DGE",  "AFGO", "DFG",  "FHG",  "BDGO"};
  return keys;
}

}  // namespace

std::string format_area_report(const AreaReport& report) {
  std::ostringstream out;
  out << "rho_star = " << csv::format_double(report.rho_star) << "\n";
  out << "v_star = " << csv::format_double(report.v_star) << "\n";
  for (const std::string& key : area_keys()) {
    out << key << " = " << csv::format_double(report.areas.at(key)) << "\n";
  }
  out << "capacity_se = " << csv::format_double(report.capacity_se) << "\n";
  out << "capacity_replica = " << csv::format_double(report.capacity_replica) << "\n";
  out << "cascading_rate = " << csv::format_double(report.cascading_rate) << "\n";
  out << "gaussian_capacity = " << csv::format_double(report.gaussian_capacity) << "\n";
  out << "siso_capacity = " << csv::format_double(report.siso_capacity) << "\n";
  return out.str();
}

void write_area_report_csv(const std::string& path, const AreaReport& report) {
  std::string header = "rho_star,v_star";
  std::string row = csv::format_double(report.rho_star) + "," + csv::format_double(report.v_star);
  for (const std::string& key : area_keys()) {
    header += "," + key;
    row += "," + csv::format_double(report.areas.at(key));
  }
  header += ",capacity_se,capacity_replica,cascading_rate,gaussian_capacity,siso_capacity";
  for (double value : {report.capacity_se, report.capacity_replica, report.cascading_rate,
                       report.gaussian_capacity, report.siso_capacity}) {
    row += "," + csv::format_double(value);
  }
  csv::write_lines(path, {"# luislab areas v" + std::string(csv::kSchemaVersion), header, row});
}

namespace {

// Strict-dominance margin of the code curve under the uncoded envelope at a
// candidate snr; +inf margin when the visited interval is empty.
struct TunnelResult {
  bool feasible = true;
  double min_margin = kInf;
};

TunnelResult tunnel_margin(const TabulatedPhiHat& code, const ChannelSpectrum& spectrum,
                           double snr, const Prior& prior) {
  const SpectrumSe se(spectrum, snr);
  const double hi = snr * 0.999;
  const double lo = std::min(se.gamma_se(1.0), hi);
  if (code.rho_max() < hi || code.rho.front() > lo) {
    throw std::invalid_argument("match_check: code curve does not cover the detector range");
  }
  const double floor = se.rho_floor();

  TunnelResult result;
  const int kGrid = 1000;
  for (int i = 0; i < kGrid; ++i) {
    const double rho = lo + (hi - lo) * static_cast<double>(i) / (kGrid - 1);
    double envelope = mmse(prior, rho);
    if (rho > floor * (1.0 + 1e-12) && rho < snr * (1.0 - 1e-15)) {
      envelope = std::min(envelope, se.eta_inverse(rho));
    }
    const double coded = code.eval(rho);
    result.min_margin = std::min(result.min_margin, envelope - coded);
    if (coded >= envelope * (1.0 - kMatchSlack)) {
      result.feasible = false;
    }
  }
  return result;
}

}  // namespace

MatchVerdict match_check(const CodeTransferCurve& code_curve, const ChannelSpectrum& spectrum,
                         double snr, const Prior& prior) {
  code_curve.validate();
  if (!(snr > 0.0)) {
    throw std::invalid_argument("match_check: snr must be positive");
  }
  const TabulatedPhiHat code = to_phi_hat(code_curve);

  MatchVerdict verdict;
  const TunnelResult at_snr = tunnel_margin(code, spectrum, snr, prior);
  verdict.feasible = at_snr.feasible;
  verdict.min_margin = at_snr.min_margin;

  // Feasibility is monotone in snr (the envelope rises with snr pointwise);
  // locate the smallest feasible snr by bisection in dB. The search is
  // limited by the code curve's coverage.
  auto feasible_at = [&](double s) {
    if (s * 0.999 > code.rho_max()) {
      return false;  // beyond coverage counts as unknown, keeps threshold conservative
    }
    return tunnel_margin(code, spectrum, s, prior).feasible;
  };

  const double snr_db = 10.0 * std::log10(snr);
  double hi_db = snr_db;
  bool hi_ok = verdict.feasible;
  const double hi_cap = std::min(snr_db + 40.0, 10.0 * std::log10(code.rho_max() / 0.999));
  while (!hi_ok && hi_db < hi_cap) {
    hi_db = std::min(hi_db + 3.0, hi_cap);
    hi_ok = feasible_at(std::pow(10.0, hi_db / 10.0));
  }
  if (!hi_ok) {
    verdict.threshold_snr = kInf;
    verdict.rate_gap =
        oamp_achievable_rate(spectrum, snr, prior) - code_rate_integral(code_curve).nats;
    return verdict;
  }
  double lo_db = hi_db;
  bool lo_feasible = true;
  while (lo_feasible && lo_db > snr_db - 60.0) {
    lo_db -= 3.0;
    lo_feasible = feasible_at(std::pow(10.0, lo_db / 10.0));
  }
  if (lo_feasible) {
    verdict.threshold_snr = 0.0;  // feasible arbitrarily far down
  } else {
    while (hi_db - lo_db > 0.01) {
      const double mid_db = 0.5 * (lo_db + hi_db);
      if (feasible_at(std::pow(10.0, mid_db / 10.0))) {
        hi_db = mid_db;
      } else {
        lo_db = mid_db;
      }
    }
    verdict.threshold_snr = std::pow(10.0, hi_db / 10.0);
  }
  verdict.rate_gap =
      oamp_achievable_rate(spectrum, snr, prior) - code_rate_integral(code_curve).nats;
  return verdict;
}

void write_match_verdict_csv(const std::string& path, const MatchVerdict& verdict) {
  const double threshold_db =
      verdict.threshold_snr > 0.0 ? 10.0 * std::log10(verdict.threshold_snr) : -kInf;
  csv::write_lines(path, {"# luislab match v" + std::string(csv::kSchemaVersion),
                          "feasible,min_margin,threshold_snr_db,rate_gap",
                          std::string(verdict.feasible ? "1" : "0") + "," +
                              csv::format_double(verdict.min_margin) + "," +
                              csv::format_double(threshold_db) + "," +
                              csv::format_double(verdict.rate_gap)});
}

RateIntegral code_rate_integral(const CodeTransferCurve& curve) {
  curve.validate();
  const SeCurve monotone = to_se_curve(curve);

  RateIntegral result;
  double trap = 0.0;
  for (size_t i = 1; i < monotone.rho.size(); ++i) {
    trap += 0.5 * (monotone.v[i] + monotone.v[i - 1]) * (monotone.rho[i] - monotone.rho[i - 1]);
  }
  // The first sample sits at rho >= 0; extend flat back to zero if needed.
  trap += monotone.v.front() * monotone.rho.front();

  const double v_end = monotone.v.back();
  result.lower_bound = trap;
  result.tail_resolved = v_end <= 1e-4;

  // Exponential tail from the last decade of decay.
  double tail = 0.0;
  bool have_rate = false;
  if (v_end > kCurveFloor * (1.0 + 1e-9)) {
    const size_t last = monotone.v.size() - 1;
    for (size_t i = last; i-- > 0;) {
      if (monotone.v[i] > v_end * 1.5) {
        const double decay =
            std::log(monotone.v[i] / v_end) / (monotone.rho[last] - monotone.rho[i]);
        tail = v_end / decay;
        have_rate = true;
        break;
      }
    }
  } else {
    have_rate = true;  // already at the floor, the remaining mass is negligible
  }
  if (!have_rate) {
    result.tail_resolved = false;
  }

  result.nats = trap + (result.tail_resolved ? tail : 0.0);
  result.upper_bound = result.tail_resolved ? trap + tail : kInf;
  result.bits_per_symbol = result.nats / std::log(2.0);
  return result;
}

}  // namespace luis
