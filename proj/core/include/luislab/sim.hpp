#pragma once

#include <string>
#include <vector>

#include "luislab/config.hpp"
#include "luislab/ldpc.hpp"

namespace luis {

// Trial-averaged detector statistics at one sweep point. Symbol error rate
// is NaN for continuous priors.
struct UncodedPoint {
  double snr_db = 0.0;
  int trials = 0;
  long symbol_errors = 0;
  long symbols = 0;
  double ser = 0.0;
  double final_mse = 0.0;
  double max_orth = 0.0;          // worst per-trial |step correlation|
  std::vector<double> v_emp;      // per-iteration means over trials
  std::vector<double> rho_emp;
  std::vector<double> orth_le;    // |trial-averaged step correlation| per iteration
  std::vector<double> orth_nle;
  std::vector<double> v_se;       // reference trace
  std::vector<double> rho_se;
};

struct UncodedSweep {
  std::vector<UncodedPoint> points;
};

// Independent channel, data, and noise per trial; per-trial seed is
// master_seed xor trial index, so results are identical for any worker
// count.
UncodedSweep run_uncoded_sweep(const ExperimentConfig& cfg);

struct CodedPoint {
  double snr_db = 0.0;
  int blocks = 0;
  long bit_errors = 0;
  long bits = 0;
  int block_errors = 0;
  double ber = 0.0;
  double bler = 0.0;
};

struct CodedSweep {
  std::vector<CodedPoint> points;
};

// One channel realization is drawn per sweep (self-averaging at coded block
// sizes) and reused across snr points; data and noise are fresh per block.
// A point stops at `trials` blocks or `target_bit_errors` accumulated on the
// committed prefix, whichever comes first.
CodedSweep run_coded_sweep(const ExperimentConfig& cfg, const LdpcCode& code);

void write_uncoded_sweep_csv(const std::string& path, const UncodedSweep& sweep);
void write_uncoded_trajectory_csv(const std::string& path, const UncodedPoint& point);
void write_coded_sweep_csv(const std::string& path, const CodedSweep& sweep);

}  // namespace luis
