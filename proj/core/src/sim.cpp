#include "luislab/sim.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "luislab/csvio.hpp"
#include "luislab/oamp.hpp"
#include "luislab/rng.hpp"
#include "luislab/state_evolution.hpp"

namespace luis {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Runs `work` for trial indices 0..total-1 with a bounded worker pool and
// commits results strictly in index order; `commit` returning false stops
// the sweep after the current index. Determinism does not depend on the
// worker count because commit order is fixed.
template <typename Result>
void run_waves(int total, int workers,
               const std::function<Result(int)>& work,
               const std::function<bool(int, Result&)>& commit) {
  workers = std::max(1, workers);
  for (int wave = 0; wave < total; wave += workers) {
    const int count = std::min(workers, total - wave);
    std::vector<Result> results(count);
    if (count == 1 || workers == 1) {
      results[0] = work(wave);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(count);
      pool.reserve(count);
      for (int i = 0; i < count; ++i) {
        pool.emplace_back([&, i] {
          try {
            results[i] = work(wave + i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) {
        t.join();
      }
      for (const auto& err : errors) {
        if (err) {
          std::rethrow_exception(err);
        }
      }
    }
    for (int i = 0; i < count; ++i) {
      if (!commit(wave + i, results[i])) {
        return;
      }
    }
  }
}

struct UncodedTrial {
  std::vector<double> v_emp, rho_emp;
  std::vector<std::complex<double>> orth_le, orth_nle;
  double max_orth = 0.0;
  double final_mse = 0.0;
  long symbol_errors = 0;
};

}  // namespace

UncodedSweep run_uncoded_sweep(const ExperimentConfig& cfg) {
  const ChannelSpectrum spectrum = cfg.spectrum();
  const int n = spectrum.cols;
  const int t_max = cfg.detector.outer_iters;
  const bool discrete = cfg.prior.kind == Prior::Kind::discrete;

  UncodedSweep sweep;
  for (double snr_db : cfg.system.snr_db) {
    const double snr = std::pow(10.0, snr_db / 10.0);
    const double sigma2 = 1.0 / snr;

    UncodedPoint point;
    point.snr_db = snr_db;
    const SeTrace trace = trace_se(spectrum, snr, cfg.prior, t_max);
    point.v_se.assign(trace.v.begin(), trace.v.begin() + t_max);
    point.rho_se = trace.rho;
    point.v_emp.assign(t_max, 0.0);
    point.rho_emp.assign(t_max, 0.0);
    point.orth_le.assign(t_max, 0.0);
    point.orth_nle.assign(t_max, 0.0);
    std::vector<std::complex<double>> orth_le_sum(t_max, 0.0), orth_nle_sum(t_max, 0.0);

    auto work = [&](int trial) {
      const std::uint64_t ts = rng::trial_seed(cfg.montecarlo.master_seed, trial);
      const ChannelInstance channel = sample_channel(spectrum, sigma2, ts, cfg.system.rotation);
      auto data_gen = rng::make_engine(rng::derive(ts, rng::Stream::data));
      auto noise_gen = rng::make_engine(rng::derive(ts, rng::Stream::noise));

      Eigen::VectorXcd x(n);
      for (int i = 0; i < n; ++i) {
        x[i] = sample_prior(cfg.prior, data_gen);
      }
      const Eigen::VectorXcd y = apply_channel(channel, x, noise_gen);

      DetectorOptions options;
      options.t_max = t_max;
      options.tracking = cfg.detector.tracking;
      options.truth = &x;
      const DetectorState state = run_uncoded(channel, y, cfg.prior, options);

      UncodedTrial trial_result;
      trial_result.v_emp.reserve(state.history.size());
      trial_result.rho_emp.reserve(state.history.size());
      for (const IterationRecord& rec : state.history) {
        trial_result.v_emp.push_back(rec.v_emp);
        trial_result.rho_emp.push_back(rec.rho_emp);
        trial_result.orth_le.push_back(rec.orth_le);
        trial_result.orth_nle.push_back(rec.orth_nle);
        for (const std::complex<double>& orth : {rec.orth_le, rec.orth_nle}) {
          if (std::isfinite(orth.real())) {
            trial_result.max_orth = std::max(trial_result.max_orth, std::abs(orth));
          }
        }
      }
      trial_result.final_mse = (state.posterior_means - x).squaredNorm() / n;
      if (discrete) {
        const Eigen::VectorXcd decisions = hard_symbols(cfg.prior, state.posterior_means);
        for (int i = 0; i < n; ++i) {
          if (std::abs(decisions[i] - x[i]) > 1e-9) {
            ++trial_result.symbol_errors;
          }
        }
      }
      return trial_result;
    };

    auto commit = [&](int, UncodedTrial& r) {
      for (int t = 0; t < t_max && t < static_cast<int>(r.v_emp.size()); ++t) {
        point.v_emp[t] += r.v_emp[t];
        point.rho_emp[t] += r.rho_emp[t];
        orth_le_sum[t] += r.orth_le[t];
        orth_nle_sum[t] += r.orth_nle[t];
      }
      point.max_orth = std::max(point.max_orth, r.max_orth);
      point.final_mse += r.final_mse;
      point.symbol_errors += r.symbol_errors;
      ++point.trials;
      return true;
    };

    run_waves<UncodedTrial>(cfg.montecarlo.trials, cfg.montecarlo.workers, work, commit);

    for (int t = 0; t < t_max; ++t) {
      point.v_emp[t] /= point.trials;
      point.rho_emp[t] /= point.trials;
      point.orth_le[t] = std::abs(orth_le_sum[t]) / point.trials;
      point.orth_nle[t] = std::abs(orth_nle_sum[t]) / point.trials;
    }
    point.final_mse /= point.trials;
    point.symbols = static_cast<long>(point.trials) * n;
    point.ser = discrete ? static_cast<double>(point.symbol_errors) / point.symbols
                         : std::numeric_limits<double>::quiet_NaN();
    sweep.points.push_back(std::move(point));
  }
  return sweep;
}

CodedSweep run_coded_sweep(const ExperimentConfig& cfg, const LdpcCode& code) {
  if (cfg.prior.name != "qpsk") {
    throw std::invalid_argument("run_coded_sweep: coded runs require the qpsk prior");
  }
  const ChannelSpectrum spectrum = cfg.spectrum();
  const int num_sym = code.n_bits / 2;
  if (spectrum.cols != num_sym) {
    throw std::invalid_argument("run_coded_sweep: system.n must equal code bits / 2");
  }

  // One rotation draw for the whole sweep; only the noise level changes
  // between points.
  ChannelInstance channel =
      sample_channel(spectrum, 1.0, cfg.montecarlo.master_seed, cfg.system.rotation);

  CodedSweep sweep;
  for (size_t pi = 0; pi < cfg.system.snr_db.size(); ++pi) {
    const double snr_db = cfg.system.snr_db[pi];
    const double snr = std::pow(10.0, snr_db / 10.0);
    channel.noise_variance = 1.0 / snr;

    CodedPoint point;
    point.snr_db = snr_db;

    struct BlockResult {
      long bit_errors = 0;
    };
    auto work = [&](int block) {
      const std::uint64_t ts = rng::trial_seed(
          cfg.montecarlo.master_seed, pi * 1000003ULL + static_cast<std::uint64_t>(block));
      auto data_gen = rng::make_engine(rng::derive(ts, rng::Stream::data));
      auto noise_gen = rng::make_engine(rng::derive(ts, rng::Stream::noise));

      std::vector<std::uint8_t> info(code.k_bits);
      for (auto& bit : info) {
        bit = static_cast<std::uint8_t>(data_gen() & 1);
      }
      const auto bits = encode(code, info);
      Eigen::VectorXcd x(num_sym);
      for (int s = 0; s < num_sym; ++s) {
        x[s] = std::complex<double>(bits[2 * s] ? -kInvSqrt2 : kInvSqrt2,
                                    bits[2 * s + 1] ? -kInvSqrt2 : kInvSqrt2);
      }
      const Eigen::VectorXcd y = apply_channel(channel, x, noise_gen);

      DecoderNle decoder(code, cfg.prior, cfg.code.inner_iters);
      DetectorOptions options;
      options.t_max = cfg.detector.outer_iters;
      const CodedResult result = run_coded(channel, y, decoder, code, options);

      BlockResult block_result;
      for (int j = 0; j < code.n_bits; ++j) {
        block_result.bit_errors += (result.decoded_bits[j] != bits[j]) ? 1 : 0;
      }
      return block_result;
    };

    auto commit = [&](int, BlockResult& r) {
      ++point.blocks;
      point.bit_errors += r.bit_errors;
      point.block_errors += r.bit_errors > 0 ? 1 : 0;
      return point.bit_errors < cfg.montecarlo.target_bit_errors;
    };

    run_waves<BlockResult>(cfg.montecarlo.trials, cfg.montecarlo.workers, work, commit);

    point.bits = static_cast<long>(point.blocks) * code.n_bits;
    point.ber = static_cast<double>(point.bit_errors) / point.bits;
    point.bler = static_cast<double>(point.block_errors) / point.blocks;
    sweep.points.push_back(point);
  }
  return sweep;
}

void write_uncoded_sweep_csv(const std::string& path, const UncodedSweep& sweep) {
  std::vector<std::string> lines;
  lines.push_back("# luislab sim-uncoded v" + std::string(csv::kSchemaVersion));
  lines.push_back("snr_db,trials,ser,symbol_errors,symbols,final_mse,max_orth");
  for (const UncodedPoint& p : sweep.points) {
    lines.push_back(csv::format_double(p.snr_db) + "," + std::to_string(p.trials) + "," +
                    csv::format_double(p.ser) + "," + std::to_string(p.symbol_errors) + "," +
                    std::to_string(p.symbols) + "," + csv::format_double(p.final_mse) + "," +
                    csv::format_double(p.max_orth));
  }
  csv::write_lines(path, lines);
}

void write_uncoded_trajectory_csv(const std::string& path, const UncodedPoint& point) {
  std::vector<std::string> lines;
  lines.push_back("# luislab trajectory v" + std::string(csv::kSchemaVersion));
  lines.push_back("t,v_emp,v_se,rho_emp,rho_se");
  for (size_t t = 0; t < point.rho_se.size(); ++t) {
    lines.push_back(std::to_string(t) + "," + csv::format_double(point.v_emp[t]) + "," +
                    csv::format_double(point.v_se[t]) + "," + csv::format_double(point.rho_emp[t]) +
                    "," + csv::format_double(point.rho_se[t]));
  }
  csv::write_lines(path, lines);
}

void write_coded_sweep_csv(const std::string& path, const CodedSweep& sweep) {
  std::vector<std::string> lines;
  lines.push_back("# luislab sim-coded v" + std::string(csv::kSchemaVersion));
  lines.push_back("snr_db,ber,bler,blocks,bit_errors");
  for (const CodedPoint& p : sweep.points) {
    lines.push_back(csv::format_double(p.snr_db) + "," + csv::format_double(p.ber) + "," +
                    csv::format_double(p.bler) + "," + std::to_string(p.blocks) + "," +
                    std::to_string(p.bit_errors));
  }
  csv::write_lines(path, lines);
}

}  // namespace luis
