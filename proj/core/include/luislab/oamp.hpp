#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "luislab/channel.hpp"
#include "luislab/ldpc.hpp"
#include "luislab/prior.hpp"
#include "luislab/state_evolution.hpp"

namespace luis {

// One detector iteration's bookkeeping. Empirical columns need the
// transmitted vector and are NaN otherwise.
struct IterationRecord {
  int t = 0;
  double v_se = 1.0;     // variance entering the linear stage
  double rho_se = 0.0;   // gamma_se(v_se)
  double v_post = 1.0;   // plugin posterior variance used for the GS step
  double v_next = 1.0;   // variance of the orthogonalized NLE output
  double v_emp = 0.0;    // empirical MSE of the NLE->LE message entering this iteration
  double rho_emp = 0.0;  // inverse empirical MSE of the LE->NLE message
  // Normalized error cross-correlation <e_in, e_out>/(|e_in||e_out|) of each
  // GS-adjusted step. Complex so trial averages cancel noise instead of
  // accumulating |corr| magnitudes.
  std::complex<double> orth_le{0.0, 0.0};
  std::complex<double> orth_nle{0.0, 0.0};
  bool clamped = false;
  bool syndrome_ok = false;
};

struct DetectorState {
  int t = 0;
  Eigen::VectorXcd message_to_le;   // unbiased x-estimate from the NLE
  Eigen::VectorXcd message_to_nle;  // unbiased x-estimate from the LE
  Eigen::VectorXcd posterior_means;
  double v_current = 1.0;
  double rho_current = 0.0;
  std::vector<IterationRecord> history;
  std::vector<std::uint8_t> hard_bits;  // last decoder decisions, coded runs
  bool clamped = false;
  bool syndrome_ok = false;
};

struct NleResult {
  Eigen::VectorXcd means;
  double v_post = 1.0;
  bool syndrome_ok = false;
  std::vector<std::uint8_t> hard_bits;  // decoders only
};

// Denoiser contract: `message` is an unbiased estimate x + noise with noise
// variance 1/rho per complex entry; returns posterior means and the
// block-average posterior variance in (0, 1].
class NlePlugin {
 public:
  virtual ~NlePlugin() = default;
  virtual NleResult denoise(const Eigen::VectorXcd& message, double rho) = 0;
};

// Entrywise posterior under a scalar prior.
class PriorNle : public NlePlugin {
 public:
  explicit PriorNle(Prior prior);
  NleResult denoise(const Eigen::VectorXcd& message, double rho) override;
  const Prior& prior() const { return prior_; }

 private:
  Prior prior_;
};

// Sum-product LDPC decoding as the denoiser.
class DecoderNle : public NlePlugin {
 public:
  DecoderNle(const LdpcCode& code, Prior prior, int inner_iters);
  NleResult denoise(const Eigen::VectorXcd& message, double rho) override;

 private:
  const LdpcCode& code_;
  Prior prior_;
  int inner_iters_;
};

enum class Tracking {
  analytic,   // variances follow state evolution (uncoded only)
  empirical,  // variances follow the plugin's posterior variance
};

struct DetectorOptions {
  int t_max = 30;
  Tracking tracking = Tracking::analytic;
  const Eigen::VectorXcd* truth = nullptr;  // enables empirical diagnostics
};

// Iterative detector on the factored channel. Both steps orthogonalize
// their output against the input message and rescale to unit gain, so every
// message stays an unbiased estimate of x.
class OampDetector {
 public:
  OampDetector(const ChannelInstance& channel, const Eigen::VectorXcd& y, NlePlugin& plugin,
               const DetectorOptions& options);

  void le_step();
  void nle_step();
  void run();  // t_max iterations, early exit on a satisfied syndrome

  const DetectorState& state() const { return state_; }
  DetectorState take_state() { return std::move(state_); }

 private:
  const ChannelInstance& channel_;
  const Eigen::VectorXcd& y_;
  NlePlugin& plugin_;
  DetectorOptions options_;
  SpectrumSe se_;
  const Prior* analytic_prior_ = nullptr;  // set when tracking analytically
  DetectorState state_;
  IterationRecord record_;
};

DetectorState run_uncoded(const ChannelInstance& channel, const Eigen::VectorXcd& y,
                          const Prior& prior, const DetectorOptions& options);

struct CodedResult {
  DetectorState state;
  std::vector<std::uint8_t> decoded_bits;
  bool success = false;  // syndrome satisfied within the iteration budget
};

// Coded detection always tracks variances empirically; the decoder's
// transfer function has no closed form.
CodedResult run_coded(const ChannelInstance& channel, const Eigen::VectorXcd& y,
                      DecoderNle& decoder, const LdpcCode& code, const DetectorOptions& options);

Eigen::VectorXcd hard_symbols(const Prior& prior, const Eigen::VectorXcd& means);

void write_trajectory_csv(const std::string& path, const std::vector<IterationRecord>& history);

}  // namespace luis
