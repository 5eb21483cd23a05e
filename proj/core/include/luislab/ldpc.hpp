#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "luislab/prior.hpp"
#include "luislab/state_evolution.hpp"

namespace luis {

// Binary LDPC code with a systematic encoder extracted by GF(2) elimination.
// Codewords are indexed in the original column order of the parity-check
// matrix; the elimination's column permutation is internal.
struct LdpcCode {
  int n_bits = 0;
  int k_bits = 0;
  int rank_deficit = 0;  // dependent parity rows found during elimination

  std::vector<std::vector<int>> check_neighbors;  // per check, sorted bit indices
  std::vector<std::vector<int>> var_neighbors;    // per bit, sorted check indices

  // pivot_cols[r] is determined by the r-th encoder row; info_cols carry the
  // systematic positions.
  std::vector<int> pivot_cols;
  std::vector<int> info_cols;
  std::vector<std::vector<std::uint64_t>> encoder_rows;  // bitsets over info bits

  double rate() const { return static_cast<double>(k_bits) / n_bits; }
  int num_checks() const { return static_cast<int>(check_neighbors.size()); }
  bool syndrome_ok(const std::vector<std::uint8_t>& bits) const;
  void validate() const;
};

// alist text: "n m", "dv_max dc_max", n variable degrees, m check degrees,
// n variable adjacency lines, m check adjacency lines; indices 1-based,
// zero padding permitted. Errors name the offending line.
LdpcCode load_alist(const std::string& text);
std::string save_alist(const LdpcCode& code);
LdpcCode load_alist_file(const std::string& path);

// Girth-aware greedy construction of a regular code: each bit's checks are
// chosen among the least-loaded checks, preferring ones outside the bit's
// current BFS neighborhood. n_bits * var_degree must be divisible by
// check_degree.
LdpcCode make_regular_code(int n_bits, int var_degree, int check_degree, std::uint64_t seed);

std::vector<std::uint8_t> encode(const LdpcCode& code, const std::vector<std::uint8_t>& info);

struct BpResult {
  std::vector<double> bit_posteriors;  // total LLRs, positive favors bit 0
  std::vector<std::uint8_t> hard_bits;
  bool syndrome_ok = false;
  int iters_used = 0;
};

// Flooding sum-product with tanh-rule check updates, messages clipped to
// +-30, early exit on a zero syndrome.
BpResult bp_decode(const LdpcCode& code, const std::vector<double>& bit_llrs, int max_iters);

struct DecoderOutput {
  Eigen::VectorXcd means;
  double v_post = 1.0;  // block-average posterior variance per symbol
  bool syndrome_ok = false;
  int iters_used = 0;
  std::vector<std::uint8_t> hard_bits;
};

// Coded denoiser for the scalar model r = sqrt(rho) x + z, z ~ CN(0,1):
// per-axis LLRs 2*sqrt(2*rho)*Re/Im(r), BP, then symbol means
// tanh(L/2)/sqrt(2) per axis. Requires the Gray-mapped QPSK prior; bit 2j
// drives the real axis of symbol j.
DecoderOutput decoder_nle(const LdpcCode& code, const Prior& prior, const Eigen::VectorXcd& message,
                          double rho, int max_iters = 50);

struct CodePoint {
  double rho = 0.0;
  double mmse_estimate = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

struct CodeTransferCurve {
  std::vector<CodePoint> samples;
  double code_rate = 0.0;
  int inner_iterations = 0;

  // Monotonicity violations beyond 2 sigma of the paired standard errors.
  int monotonicity_flags() const;
  void validate() const;
};

// Monte-Carlo estimate of the decoder's per-symbol MMSE transfer function:
// random codewords through the scalar channel at each rho, block-averaged
// squared error of the posterior means. Deterministic per (point, block).
CodeTransferCurve estimate_transfer_curve(const LdpcCode& code, const Prior& prior,
                                          const std::vector<double>& rho_grid,
                                          int blocks_per_point, int inner_iters,
                                          std::uint64_t seed);

void write_code_curve_csv(const std::string& path, const CodeTransferCurve& curve);
CodeTransferCurve read_code_curve_csv(const std::string& path);

// Monotone view for state evolution and matching checks.
SeCurve to_se_curve(const CodeTransferCurve& curve);
TabulatedPhiHat to_phi_hat(const CodeTransferCurve& curve);

}  // namespace luis
