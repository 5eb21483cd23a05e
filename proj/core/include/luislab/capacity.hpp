#pragma once

#include <limits>
#include <map>
#include <string>

#include "luislab/channel.hpp"
#include "luislab/ldpc.hpp"
#include "luislab/prior.hpp"
#include "luislab/state_evolution.hpp"

namespace luis {

// Constrained capacity per transmit dimension, in nats, from the state
// evolution fixed point: mmse integral + ln v* + average log determinant.
double capacity_via_areas(const ChannelSpectrum& spectrum, double snr, const Prior& prior);

struct ReplicaSolution {
  double capacity = 0.0;
  double rho_star = 0.0;
  double v_star = 1.0;
  int iterations = 0;
};

// Independent route through the R-transform: damped alternation of
// rho = snr * R(-snr v), v = mmse(rho), then
// capacity = r_integral(snr v*) + I(x; sqrt(rho*) x + z) - rho* v*.
ReplicaSolution capacity_via_replica(const ChannelSpectrum& spectrum, double snr,
                                     const Prior& prior);

// Named plane regions of the (rho, v) diagram. AHO is the constellation
// entropy and is infinite for continuous priors.
struct AreaReport {
  double rho_star = 0.0;
  double v_star = 1.0;
  std::map<std::string, double> areas;
  bool aho_infinite = false;
  double capacity_se = 0.0;
  double capacity_replica = 0.0;
  double cascading_rate = 0.0;
  double gaussian_capacity = 0.0;
  double siso_capacity = 0.0;
};

AreaReport area_report(const ChannelSpectrum& spectrum, double snr, const Prior& prior);

std::string format_area_report(const AreaReport& report);  // flat key = value block
void write_area_report_csv(const std::string& path, const AreaReport& report);

// Region integral of the min envelope of the constellation-mmse and inverse
// linear-stage curves over [0, snr]; equals the capacity when the matched
// code limit is attainable. Vertical linear-stage segments contribute zero.
double oamp_achievable_rate(const ChannelSpectrum& spectrum, double snr, const Prior& prior);

struct MatchVerdict {
  bool feasible = false;
  double min_margin = 0.0;    // min over the grid of envelope - code curve
  double threshold_snr = std::numeric_limits<double>::infinity();  // linear
  double rate_gap = 0.0;      // achievable rate - code rate integral
};

// Decoding-tunnel check: the code curve must sit strictly below the uncoded
// envelope for every rho the detector visits, operationalized as
// code < envelope * (1 - 1e-4) on a 10^3-point grid from the first detector
// SNR gamma_se(1) up to 0.999 snr. threshold_snr is located by bisection to
// 0.01 dB; infinity if infeasible 40 dB above snr, zero if feasible 60 dB
// below.
MatchVerdict match_check(const CodeTransferCurve& code_curve, const ChannelSpectrum& spectrum,
                         double snr, const Prior& prior);

void write_match_verdict_csv(const std::string& path, const MatchVerdict& verdict);

struct RateIntegral {
  double nats = 0.0;
  double bits_per_symbol = 0.0;
  bool tail_resolved = false;
  double lower_bound = 0.0;  // trapezoid alone
  double upper_bound = 0.0;  // infinite when the tail is unresolved
};

// Trapezoidal integral of the monotone code curve plus an exponential tail
// fitted to the last decade; the tail is resolved when the final sample is
// at or below 1e-4.
RateIntegral code_rate_integral(const CodeTransferCurve& curve);

}  // namespace luis
