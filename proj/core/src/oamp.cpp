#include "luislab/oamp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "luislab/csvio.hpp"

namespace luis {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kVarianceFloor = 1e-14;  // keeps gamma_se evaluable after saturation

std::complex<double> error_correlation(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    return {0.0, 0.0};
  }
  return a.dot(b) / (na * nb);
}

}  // namespace

PriorNle::PriorNle(Prior prior) : prior_(std::move(prior)) { prior_.validate(); }

NleResult PriorNle::denoise(const Eigen::VectorXcd& message, double rho) {
  NleResult result;
  result.means.resize(message.size());
  const double amp = std::sqrt(rho);
  double var_sum = 0.0;
  for (Eigen::Index i = 0; i < message.size(); ++i) {
    const PosteriorStat stat = posterior_stat(prior_, amp * message[i], rho);
    result.means[i] = stat.mean;
    var_sum += stat.variance;
  }
  result.v_post = std::max(var_sum / message.size(), kVarianceFloor);
  return result;
}

DecoderNle::DecoderNle(const LdpcCode& code, Prior prior, int inner_iters)
    : code_(code), prior_(std::move(prior)), inner_iters_(inner_iters) {
  code_.validate();
  if (inner_iters < 0) {
    throw std::invalid_argument("DecoderNle: inner_iters must be nonnegative");
  }
}

NleResult DecoderNle::denoise(const Eigen::VectorXcd& message, double rho) {
  DecoderOutput out = decoder_nle(code_, prior_, std::sqrt(rho) * message, rho, inner_iters_);
  NleResult result;
  result.means = std::move(out.means);
  result.v_post = std::max(out.v_post, kVarianceFloor);
  result.syndrome_ok = out.syndrome_ok;
  result.hard_bits = std::move(out.hard_bits);
  return result;
}

OampDetector::OampDetector(const ChannelInstance& channel, const Eigen::VectorXcd& y,
                           NlePlugin& plugin, const DetectorOptions& options)
    : channel_(channel),
      y_(y),
      plugin_(plugin),
      options_(options),
      se_(channel.spectrum, 1.0 / channel.noise_variance) {
  if (!(channel_.noise_variance > 0.0)) {
    throw std::invalid_argument("OampDetector: noise variance must be positive");
  }
  if (y_.size() != channel_.spectrum.rows) {
    throw std::invalid_argument("OampDetector: observation length mismatch");
  }
  if (options_.t_max < 1) {
    throw std::invalid_argument("OampDetector: t_max must be positive");
  }
  const int n = channel_.spectrum.cols;
  if (options_.truth && options_.truth->size() != n) {
    throw std::invalid_argument("OampDetector: truth length mismatch");
  }
  if (options_.tracking == Tracking::analytic) {
    auto* scalar = dynamic_cast<PriorNle*>(&plugin_);
    if (scalar == nullptr) {
      throw std::invalid_argument("OampDetector: analytic tracking requires a prior denoiser");
    }
    analytic_prior_ = &scalar->prior();
  }
  state_.message_to_le = Eigen::VectorXcd::Zero(n);  // prior mean
  state_.v_current = 1.0;
}

void OampDetector::le_step() {
  const double v = state_.v_current;
  const int n = channel_.spectrum.cols;
  const int rank = channel_.spectrum.rank();
  const double sigma2 = channel_.noise_variance;
  const Eigen::VectorXd& d = channel_.spectrum.singular_values;

  record_ = IterationRecord{};
  record_.t = state_.t;
  record_.v_se = v;
  record_.v_emp = kNan;
  record_.rho_emp = kNan;
  record_.orth_le = {kNan, kNan};
  record_.orth_nle = {kNan, kNan};

  Eigen::VectorXcd e_in;
  if (options_.truth) {
    e_in = state_.message_to_le - *options_.truth;
    record_.v_emp = e_in.squaredNorm() / n;
  }

  // LMMSE prototype r + v A^H (v A A^H + sigma^2 I)^{-1} (y - A r) through
  // the factored operator: the resolvent is diagonal in the U basis.
  const Eigen::VectorXcd rotated = channel_.mul_left(y_ - channel_.apply(state_.message_to_le));
  Eigen::VectorXcd shrunk = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < rank; ++i) {
    shrunk[i] = d[i] * rotated[i] / (v * d[i] * d[i] + sigma2);
  }
  const Eigen::VectorXcd proto = state_.message_to_le + v * channel_.mul_right_adjoint(shrunk);

  const double b = se_.gs_coefficient(v);
  const double complement = se_.gs_complement(v);
  state_.message_to_nle = (proto - b * state_.message_to_le) / complement;
  state_.rho_current = se_.gamma_se(v);
  record_.rho_se = state_.rho_current;

  if (options_.truth) {
    const Eigen::VectorXcd e_out = state_.message_to_nle - *options_.truth;
    record_.rho_emp = n / e_out.squaredNorm();
    record_.orth_le = error_correlation(e_in, e_out);
  }
}

void OampDetector::nle_step() {
  const double rho = state_.rho_current;
  const NleResult result = plugin_.denoise(state_.message_to_nle, rho);
  if (!(result.v_post > 0.0) || result.v_post > 1.0 + 1e-9) {
    throw std::runtime_error("OampDetector: plugin posterior variance outside (0, 1]");
  }
  const double v_post =
      analytic_prior_ != nullptr ? mmse(*analytic_prior_, rho) : result.v_post;
  record_.v_post = v_post;

  const double b = rho * v_post;
  const double complement = 1.0 - b;
  if (complement <= 0.0) {
    // Posterior variance at or above 1/rho: the orthogonalized variance
    // would be nonpositive. Pass the means through and keep the variance.
    state_.message_to_le = result.means;
    state_.clamped = true;
    record_.clamped = true;
    record_.v_next = state_.v_current;
  } else {
    state_.message_to_le = (result.means - b * state_.message_to_nle) / complement;
    state_.v_current = std::max(v_post / complement, kVarianceFloor);
    record_.v_next = state_.v_current;
  }

  state_.posterior_means = result.means;
  state_.syndrome_ok = result.syndrome_ok;
  record_.syndrome_ok = result.syndrome_ok;
  if (!result.hard_bits.empty()) {
    state_.hard_bits = result.hard_bits;
  }
  if (options_.truth) {
    const Eigen::VectorXcd e_in = state_.message_to_nle - *options_.truth;
    const Eigen::VectorXcd e_out = state_.message_to_le - *options_.truth;
    record_.orth_nle = error_correlation(e_in, e_out);
  }
  state_.history.push_back(record_);
  ++state_.t;
}

void OampDetector::run() {
  for (int t = 0; t < options_.t_max; ++t) {
    le_step();
    nle_step();
    if (state_.syndrome_ok) {
      break;
    }
  }
}

DetectorState run_uncoded(const ChannelInstance& channel, const Eigen::VectorXcd& y,
                          const Prior& prior, const DetectorOptions& options) {
  PriorNle plugin(prior);
  OampDetector detector(channel, y, plugin, options);
  detector.run();
  return detector.take_state();
}

CodedResult run_coded(const ChannelInstance& channel, const Eigen::VectorXcd& y,
                      DecoderNle& decoder, const LdpcCode& code, const DetectorOptions& options) {
  DetectorOptions coded_options = options;
  coded_options.tracking = Tracking::empirical;
  OampDetector detector(channel, y, decoder, coded_options);
  detector.run();

  CodedResult result;
  result.state = detector.take_state();
  result.success = result.state.syndrome_ok;
  result.decoded_bits = result.state.hard_bits;
  if (result.decoded_bits.empty()) {
    result.decoded_bits.assign(code.n_bits, 0);
  }
  return result;
}

Eigen::VectorXcd hard_symbols(const Prior& prior, const Eigen::VectorXcd& means) {
  Eigen::VectorXcd out(means.size());
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    out[i] = hard_decision(prior, means[i]);
  }
  return out;
}

void write_trajectory_csv(const std::string& path, const std::vector<IterationRecord>& history) {
  std::vector<std::string> lines;
  lines.push_back("# luislab trajectory v" + std::string(csv::kSchemaVersion));
  lines.push_back("t,v_emp,v_se,rho_emp,rho_se");
  for (const IterationRecord& rec : history) {
    lines.push_back(std::to_string(rec.t) + "," + csv::format_double(rec.v_emp) + "," +
                    csv::format_double(rec.v_se) + "," + csv::format_double(rec.rho_emp) + "," +
                    csv::format_double(rec.rho_se));
  }
  csv::write_lines(path, lines);
}

}  // namespace luis
