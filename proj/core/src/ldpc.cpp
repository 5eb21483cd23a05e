#include "luislab/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "luislab/csvio.hpp"
#include "luislab/rng.hpp"

namespace luis {

namespace {

constexpr double kLlrClip = 30.0;
constexpr double kInvSqrt2 = 0.70710678118654752440;

using BitRow = std::vector<std::uint64_t>;

bool test_bit(const BitRow& row, int c) { return (row[c >> 6] >> (c & 63)) & 1ULL; }

void set_bit(BitRow& row, int c) { row[c >> 6] |= 1ULL << (c & 63); }

void xor_into(BitRow& dst, const BitRow& src) {
  for (size_t w = 0; w < dst.size(); ++w) {
    dst[w] ^= src[w];
  }
}

std::vector<std::vector<int>> transpose_adjacency(const std::vector<std::vector<int>>& fwd,
                                                  int out_size) {
  std::vector<std::vector<int>> rev(out_size);
  for (size_t i = 0; i < fwd.size(); ++i) {
    for (int j : fwd[i]) {
      rev[j].push_back(static_cast<int>(i));
    }
  }
  for (auto& list : rev) {
    std::sort(list.begin(), list.end());
  }
  return rev;
}

// Row-reduces H and extracts the systematic encoder: pivot columns become
// parity positions, free columns carry information bits. Row space is
// preserved, so the reduced rows define valid parities for the original code.
void build_encoder(LdpcCode& code) {
  const int n = code.n_bits;
  const int m = code.num_checks();
  const int words = (n + 63) / 64;
  std::vector<BitRow> rows(m, BitRow(words, 0));
  for (int c = 0; c < m; ++c) {
    for (int j : code.check_neighbors[c]) {
      set_bit(rows[c], j);
    }
  }

  code.pivot_cols.clear();
  int rank = 0;
  for (int col = 0; col < n && rank < m; ++col) {
    int pivot = -1;
    for (int i = rank; i < m; ++i) {
      if (test_bit(rows[i], col)) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) {
      continue;
    }
    std::swap(rows[rank], rows[pivot]);
    for (int i = 0; i < m; ++i) {
      if (i != rank && test_bit(rows[i], col)) {
        xor_into(rows[i], rows[rank]);
      }
    }
    code.pivot_cols.push_back(col);
    ++rank;
  }
  code.rank_deficit = m - rank;
  code.k_bits = n - rank;

  std::vector<bool> is_pivot(n, false);
  for (int col : code.pivot_cols) {
    is_pivot[col] = true;
  }
  code.info_cols.clear();
  for (int col = 0; col < n; ++col) {
    if (!is_pivot[col]) {
      code.info_cols.push_back(col);
    }
  }

  const int k_words = (code.k_bits + 63) / 64;
  code.encoder_rows.assign(rank, BitRow(k_words, 0));
  for (int r = 0; r < rank; ++r) {
    for (int j = 0; j < code.k_bits; ++j) {
      if (test_bit(rows[r], code.info_cols[j])) {
        set_bit(code.encoder_rows[r], j);
      }
    }
  }
}

}  // namespace

bool LdpcCode::syndrome_ok(const std::vector<std::uint8_t>& bits) const {
  if (static_cast<int>(bits.size()) != n_bits) {
    throw std::invalid_argument("syndrome_ok: bit vector length mismatch");
  }
  for (const auto& neighbors : check_neighbors) {
    int parity = 0;
    for (int j : neighbors) {
      parity ^= bits[j] & 1;
    }
    if (parity) {
      return false;
    }
  }
  return true;
}

void LdpcCode::validate() const {
  if (n_bits <= 0 || k_bits < 0 || k_bits > n_bits) {
    throw std::invalid_argument("LdpcCode: invalid dimensions");
  }
  for (const auto& neighbors : check_neighbors) {
    for (size_t i = 0; i < neighbors.size(); ++i) {
      if (neighbors[i] < 0 || neighbors[i] >= n_bits) {
        throw std::invalid_argument("LdpcCode: bit index out of range");
      }
      if (i > 0 && neighbors[i] <= neighbors[i - 1]) {
        throw std::invalid_argument("LdpcCode: adjacency must be sorted and duplicate-free");
      }
    }
  }
  const int rank = n_bits - k_bits;
  if (static_cast<int>(pivot_cols.size()) != rank ||
      static_cast<int>(encoder_rows.size()) != rank ||
      static_cast<int>(info_cols.size()) != k_bits) {
    throw std::invalid_argument("LdpcCode: encoder tables inconsistent with dimensions");
  }
}

namespace {

struct LineReader {
  std::vector<std::string> lines;
  size_t next = 0;

  explicit LineReader(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      lines.push_back(line);
    }
  }

  std::vector<long> ints(const char* what) {
    while (next < lines.size()) {
      std::istringstream ls(lines[next]);
      ++next;
      std::vector<long> values;
      long v;
      while (ls >> v) {
        values.push_back(v);
      }
      std::string leftover;
      if (ls.clear(), ls >> leftover) {
        throw std::invalid_argument("alist line " + std::to_string(next) + ": non-integer token");
      }
      if (!values.empty()) {
        return values;
      }
      // blank lines are tolerated between sections
    }
    throw std::invalid_argument(std::string("alist: unexpected end of file while reading ") +
                                what + " at line " + std::to_string(next + 1));
  }
};

}  // namespace

LdpcCode load_alist(const std::string& text) {
  LineReader reader(text);

  const auto dims = reader.ints("the size line");
  if (dims.size() != 2 || dims[0] <= 0 || dims[1] <= 0) {
    throw std::invalid_argument("alist line " + std::to_string(reader.next) +
                                ": expected 'n m' with positive entries");
  }
  const int n = static_cast<int>(dims[0]);
  const int m = static_cast<int>(dims[1]);

  const auto max_degs = reader.ints("the max-degree line");
  if (max_degs.size() != 2 || max_degs[0] < 0 || max_degs[1] < 0) {
    throw std::invalid_argument("alist line " + std::to_string(reader.next) +
                                ": expected 'dv_max dc_max'");
  }

  const auto var_degs = reader.ints("variable degrees");
  if (static_cast<int>(var_degs.size()) != n) {
    throw std::invalid_argument("alist line " + std::to_string(reader.next) + ": expected " +
                                std::to_string(n) + " variable degrees");
  }
  const auto check_degs = reader.ints("check degrees");
  if (static_cast<int>(check_degs.size()) != m) {
    throw std::invalid_argument("alist line " + std::to_string(reader.next) + ": expected " +
                                std::to_string(m) + " check degrees");
  }

  auto read_adjacency = [&](int count, const std::vector<long>& degs, int index_limit,
                            const char* what) {
    std::vector<std::vector<int>> adj(count);
    for (int i = 0; i < count; ++i) {
      const auto entries = reader.ints(what);
      std::vector<int> neighbors;
      for (long e : entries) {
        if (e == 0) {
          continue;  // zero padding
        }
        if (e < 1 || e > index_limit) {
          throw std::invalid_argument("alist line " + std::to_string(reader.next) +
                                      ": index out of range");
        }
        neighbors.push_back(static_cast<int>(e - 1));
      }
      if (static_cast<long>(neighbors.size()) != degs[i]) {
        throw std::invalid_argument("alist line " + std::to_string(reader.next) + ": expected " +
                                    std::to_string(degs[i]) + " entries");
      }
      std::sort(neighbors.begin(), neighbors.end());
      if (std::adjacent_find(neighbors.begin(), neighbors.end()) != neighbors.end()) {
        throw std::invalid_argument("alist line " + std::to_string(reader.next) +
                                    ": duplicate index");
      }
      adj[i] = std::move(neighbors);
    }
    return adj;
  };

  const auto var_adj = read_adjacency(n, var_degs, m, "variable adjacency");
  auto check_adj = read_adjacency(m, check_degs, n, "check adjacency");

  if (transpose_adjacency(var_adj, m) != check_adj) {
    throw std::invalid_argument("alist: check adjacency disagrees with the variable lists");
  }

  LdpcCode code;
  code.n_bits = n;
  code.check_neighbors = std::move(check_adj);
  code.var_neighbors = var_adj;
  build_encoder(code);
  code.validate();
  return code;
}

LdpcCode load_alist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open alist file " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_alist(buf.str());
}

std::string save_alist(const LdpcCode& code) {
  const int n = code.n_bits;
  const int m = code.num_checks();
  size_t dv_max = 0, dc_max = 0;
  for (const auto& l : code.var_neighbors) dv_max = std::max(dv_max, l.size());
  for (const auto& l : code.check_neighbors) dc_max = std::max(dc_max, l.size());

  std::ostringstream out;
  out << n << " " << m << "\n" << dv_max << " " << dc_max << "\n";
  for (int j = 0; j < n; ++j) {
    out << code.var_neighbors[j].size() << (j + 1 < n ? " " : "\n");
  }
  for (int c = 0; c < m; ++c) {
    out << code.check_neighbors[c].size() << (c + 1 < m ? " " : "\n");
  }
  auto write_rows = [&](const std::vector<std::vector<int>>& adj, size_t width) {
    for (const auto& list : adj) {
      for (size_t i = 0; i < width; ++i) {
        out << (i < list.size() ? list[i] + 1 : 0) << (i + 1 < width ? " " : "\n");
      }
    }
  };
  write_rows(code.var_neighbors, dv_max);
  write_rows(code.check_neighbors, dc_max);
  return out.str();
}

LdpcCode make_regular_code(int n_bits, int var_degree, int check_degree, std::uint64_t seed) {
  if (n_bits <= 0 || var_degree <= 0 || check_degree <= var_degree) {
    throw std::invalid_argument("make_regular_code: need n > 0 and check_degree > var_degree > 0");
  }
  if ((static_cast<long>(n_bits) * var_degree) % check_degree != 0) {
    throw std::invalid_argument("make_regular_code: n * var_degree not divisible by check_degree");
  }
  const int m = n_bits * var_degree / check_degree;
  auto gen = rng::make_engine(rng::derive(seed, rng::Stream::construction));

  std::vector<std::vector<int>> var_adj(n_bits), check_adj(m);
  std::vector<int> check_deg(m, 0);
  std::vector<int> check_epoch(m, -1), var_epoch(n_bits, -1);
  int epoch = 0;

  // Girth-aware greedy: each new edge prefers checks outside the bit's
  // current BFS neighborhood, breaking ties by load then uniformly.
  constexpr int kBfsDepth = 6;
  std::vector<int> frontier, next_frontier;
  for (int j = 0; j < n_bits; ++j) {
    for (int e = 0; e < var_degree; ++e) {
      ++epoch;
      var_epoch[j] = epoch;
      int reached = 0;
      frontier.assign(1, j);
      for (int depth = 0; depth < kBfsDepth && !frontier.empty() && reached < m; ++depth) {
        next_frontier.clear();
        for (int v : frontier) {
          for (int c : var_adj[v]) {
            if (check_epoch[c] == epoch) {
              continue;
            }
            check_epoch[c] = epoch;
            ++reached;
            for (int v2 : check_adj[c]) {
              if (var_epoch[v2] != epoch) {
                var_epoch[v2] = epoch;
                next_frontier.push_back(v2);
              }
            }
          }
        }
        std::swap(frontier, next_frontier);
      }

      auto pick = [&](bool require_unreached, bool respect_cap) {
        int best_deg = std::numeric_limits<int>::max();
        std::vector<int> ties;
        for (int c = 0; c < m; ++c) {
          if (respect_cap && check_deg[c] >= check_degree) {
            continue;
          }
          if (require_unreached && check_epoch[c] == epoch) {
            continue;
          }
          if (std::find(var_adj[j].begin(), var_adj[j].end(), c) != var_adj[j].end()) {
            continue;
          }
          if (check_deg[c] < best_deg) {
            best_deg = check_deg[c];
            ties.assign(1, c);
          } else if (check_deg[c] == best_deg) {
            ties.push_back(c);
          }
        }
        if (ties.empty()) {
          return -1;
        }
        std::uniform_int_distribution<size_t> dist(0, ties.size() - 1);
        return ties[dist(gen)];
      };

      int chosen = pick(true, true);
      if (chosen < 0) {
        chosen = pick(false, true);
      }
      if (chosen < 0) {
        // Endgame corner: every underfilled check is already a neighbor.
        // A slightly overfull check beats a parallel edge.
        chosen = pick(false, false);
      }
      if (chosen < 0) {
        throw std::runtime_error("make_regular_code: no admissible check left");
      }
      var_adj[j].push_back(chosen);
      check_adj[chosen].push_back(j);
      ++check_deg[chosen];
    }
    std::sort(var_adj[j].begin(), var_adj[j].end());
  }

  LdpcCode code;
  code.n_bits = n_bits;
  for (auto& list : check_adj) {
    std::sort(list.begin(), list.end());
  }
  code.check_neighbors = std::move(check_adj);
  code.var_neighbors = std::move(var_adj);
  build_encoder(code);
  code.validate();
  return code;
}

std::vector<std::uint8_t> encode(const LdpcCode& code, const std::vector<std::uint8_t>& info) {
  if (static_cast<int>(info.size()) != code.k_bits) {
    throw std::invalid_argument("encode: expected " + std::to_string(code.k_bits) + " info bits");
  }
  const int k_words = (code.k_bits + 63) / 64;
  BitRow packed(k_words, 0);
  for (int j = 0; j < code.k_bits; ++j) {
    if (info[j] & 1) {
      set_bit(packed, j);
    }
  }
  std::vector<std::uint8_t> bits(code.n_bits, 0);
  for (int j = 0; j < code.k_bits; ++j) {
    bits[code.info_cols[j]] = info[j] & 1;
  }
  for (size_t r = 0; r < code.encoder_rows.size(); ++r) {
    int parity = 0;
    const BitRow& row = code.encoder_rows[r];
    for (int w = 0; w < k_words; ++w) {
      parity ^= __builtin_parityll(row[w] & packed[w]);
    }
    bits[code.pivot_cols[r]] = static_cast<std::uint8_t>(parity);
  }
  return bits;
}

namespace {

double clip_llr(double x) { return std::clamp(x, -kLlrClip, kLlrClip); }

std::vector<std::uint8_t> hard_from_llr(const std::vector<double>& llr) {
  std::vector<std::uint8_t> bits(llr.size());
  for (size_t i = 0; i < llr.size(); ++i) {
    bits[i] = llr[i] < 0.0 ? 1 : 0;
  }
  return bits;
}

}  // namespace

BpResult bp_decode(const LdpcCode& code, const std::vector<double>& bit_llrs, int max_iters) {
  if (static_cast<int>(bit_llrs.size()) != code.n_bits) {
    throw std::invalid_argument("bp_decode: LLR vector length mismatch");
  }
  if (max_iters < 0) {
    throw std::invalid_argument("bp_decode: max_iters must be nonnegative");
  }
  const int m = code.num_checks();

  std::vector<double> channel(code.n_bits);
  for (int j = 0; j < code.n_bits; ++j) {
    if (!std::isfinite(bit_llrs[j])) {
      throw std::invalid_argument("bp_decode: non-finite LLR");
    }
    channel[j] = clip_llr(bit_llrs[j]);
  }

  // Flat edge layout in check-major order.
  std::vector<int> offset(m + 1, 0);
  for (int c = 0; c < m; ++c) {
    offset[c + 1] = offset[c] + static_cast<int>(code.check_neighbors[c].size());
  }
  const int n_edges = offset[m];
  std::vector<int> edge_var(n_edges);
  for (int c = 0; c < m; ++c) {
    std::copy(code.check_neighbors[c].begin(), code.check_neighbors[c].end(),
              edge_var.begin() + offset[c]);
  }

  std::vector<double> c2v(n_edges, 0.0);
  std::vector<double> total = channel;

  BpResult result;
  result.hard_bits = hard_from_llr(total);
  result.syndrome_ok = code.syndrome_ok(result.hard_bits);

  std::vector<double> tanh_buf, prefix;
  for (int it = 0; it < max_iters && !result.syndrome_ok; ++it) {
    for (int c = 0; c < m; ++c) {
      const int lo = offset[c], hi = offset[c + 1];
      const int deg = hi - lo;
      if (deg == 0) {
        continue;
      }
      tanh_buf.resize(deg);
      prefix.resize(deg + 1);
      prefix[0] = 1.0;
      for (int e = 0; e < deg; ++e) {
        const double v2c = clip_llr(total[edge_var[lo + e]] - c2v[lo + e]);
        tanh_buf[e] = std::tanh(0.5 * v2c);
        prefix[e + 1] = prefix[e] * tanh_buf[e];
      }
      double suffix = 1.0;
      for (int e = deg - 1; e >= 0; --e) {
        const double excl = std::clamp(prefix[e] * suffix, -(1.0 - 1e-15), 1.0 - 1e-15);
        suffix *= tanh_buf[e];
        c2v[lo + e] = clip_llr(2.0 * std::atanh(excl));
      }
    }
    total = channel;
    for (int e = 0; e < n_edges; ++e) {
      total[edge_var[e]] += c2v[e];
    }
    result.iters_used = it + 1;
    result.hard_bits = hard_from_llr(total);
    result.syndrome_ok = code.syndrome_ok(result.hard_bits);
  }

  result.bit_posteriors = std::move(total);
  return result;
}

DecoderOutput decoder_nle(const LdpcCode& code, const Prior& prior, const Eigen::VectorXcd& message,
                          double rho, int max_iters) {
  if (prior.name != "qpsk") {
    throw std::invalid_argument("decoder_nle: only the qpsk prior is supported");
  }
  if (code.n_bits % 2 != 0) {
    throw std::invalid_argument("decoder_nle: n_bits must be even for qpsk");
  }
  const int num_sym = code.n_bits / 2;
  if (message.size() != num_sym) {
    throw std::invalid_argument("decoder_nle: expected " + std::to_string(num_sym) + " symbols");
  }
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("decoder_nle: rho must be finite and nonnegative");
  }

  // r = sqrt(rho) x + z per axis: amplitude 1/sqrt(2), noise variance 1/2.
  const double scale = 2.0 * std::sqrt(2.0 * rho);
  std::vector<double> llr(code.n_bits);
  for (int s = 0; s < num_sym; ++s) {
    llr[2 * s] = scale * message[s].real();
    llr[2 * s + 1] = scale * message[s].imag();
  }

  BpResult bp = bp_decode(code, llr, max_iters);

  DecoderOutput out;
  out.syndrome_ok = bp.syndrome_ok;
  out.iters_used = bp.iters_used;
  out.hard_bits = std::move(bp.hard_bits);
  out.means.resize(num_sym);
  double var_sum = 0.0;
  for (int s = 0; s < num_sym; ++s) {
    const double tr = std::tanh(0.5 * bp.bit_posteriors[2 * s]);
    const double ti = std::tanh(0.5 * bp.bit_posteriors[2 * s + 1]);
    out.means[s] = std::complex<double>(tr * kInvSqrt2, ti * kInvSqrt2);
    var_sum += 1.0 - 0.5 * (tr * tr + ti * ti);
  }
  out.v_post = var_sum / num_sym;
  return out;
}

int CodeTransferCurve::monotonicity_flags() const {
  int flags = 0;
  for (size_t i = 1; i < samples.size(); ++i) {
    const double rise = samples[i].mmse_estimate - samples[i - 1].mmse_estimate;
    const double sigma = std::hypot(samples[i].std_error, samples[i - 1].std_error);
    if (rise > 2.0 * sigma) {
      ++flags;
    }
  }
  return flags;
}

void CodeTransferCurve::validate() const {
  if (samples.empty()) {
    throw std::invalid_argument("CodeTransferCurve: no samples");
  }
  for (size_t i = 0; i < samples.size(); ++i) {
    const CodePoint& p = samples[i];
    if (!(p.rho >= 0.0) || !std::isfinite(p.rho)) {
      throw std::invalid_argument("CodeTransferCurve: rho must be finite and nonnegative");
    }
    if (i > 0 && !(p.rho > samples[i - 1].rho)) {
      throw std::invalid_argument("CodeTransferCurve: rho must be strictly increasing");
    }
    if (!(p.mmse_estimate >= 0.0) || p.mmse_estimate > 1.05) {
      throw std::invalid_argument("CodeTransferCurve: mmse estimate outside [0, 1]");
    }
    if (p.std_error < 0.0 || p.trials < 1) {
      throw std::invalid_argument("CodeTransferCurve: bad sample statistics");
    }
  }
  if (!(code_rate > 0.0) || code_rate > 1.0 || inner_iterations < 0) {
    throw std::invalid_argument("CodeTransferCurve: bad metadata");
  }
}

CodeTransferCurve estimate_transfer_curve(const LdpcCode& code, const Prior& prior,
                                          const std::vector<double>& rho_grid,
                                          int blocks_per_point, int inner_iters,
                                          std::uint64_t seed) {
  if (blocks_per_point < 1) {
    throw std::invalid_argument("estimate_transfer_curve: blocks_per_point must be >= 1");
  }
  for (size_t i = 1; i < rho_grid.size(); ++i) {
    if (!(rho_grid[i] > rho_grid[i - 1])) {
      throw std::invalid_argument("estimate_transfer_curve: rho grid must be increasing");
    }
  }
  const int num_sym = code.n_bits / 2;

  CodeTransferCurve curve;
  curve.code_rate = code.rate();
  curve.inner_iterations = inner_iters;
  curve.samples.reserve(rho_grid.size());

  std::vector<std::uint8_t> info(code.k_bits);
  for (size_t pi = 0; pi < rho_grid.size(); ++pi) {
    const double rho = rho_grid[pi];
    double sum = 0.0, sum_sq = 0.0;
    for (int b = 0; b < blocks_per_point; ++b) {
      const std::uint64_t ts =
          rng::trial_seed(seed, pi * static_cast<std::uint64_t>(blocks_per_point) + b);
      auto data_gen = rng::make_engine(rng::derive(ts, rng::Stream::data));
      auto noise_gen = rng::make_engine(rng::derive(ts, rng::Stream::noise));

      for (auto& bit : info) {
        bit = static_cast<std::uint8_t>(data_gen() & 1);
      }
      const auto bits = encode(code, info);
      Eigen::VectorXcd x(num_sym), r(num_sym);
      for (int s = 0; s < num_sym; ++s) {
        x[s] = std::complex<double>(bits[2 * s] ? -kInvSqrt2 : kInvSqrt2,
                                    bits[2 * s + 1] ? -kInvSqrt2 : kInvSqrt2);
      }
      const double amp = std::sqrt(rho);
      for (int s = 0; s < num_sym; ++s) {
        r[s] = amp * x[s] + rng::standard_cgauss(noise_gen);
      }
      const DecoderOutput out = decoder_nle(code, prior, r, rho, inner_iters);
      const double mse = (out.means - x).squaredNorm() / num_sym;
      sum += mse;
      sum_sq += mse * mse;
    }
    CodePoint point;
    point.rho = rho;
    point.trials = blocks_per_point;
    point.mmse_estimate = sum / blocks_per_point;
    if (blocks_per_point > 1) {
      const double var =
          std::max(0.0, (sum_sq - sum * sum / blocks_per_point) / (blocks_per_point - 1));
      point.std_error = std::sqrt(var / blocks_per_point);
    }
    curve.samples.push_back(point);
  }
  curve.validate();
  return curve;
}

void write_code_curve_csv(const std::string& path, const CodeTransferCurve& curve) {
  curve.validate();
  std::vector<std::string> lines;
  lines.push_back("# luislab code-curve v" + std::string(csv::kSchemaVersion));
  lines.push_back("# rate=" + csv::format_double(curve.code_rate));
  lines.push_back("# inner_iters=" + std::to_string(curve.inner_iterations));
  lines.push_back("rho,mmse,stderr,trials");
  for (const CodePoint& p : curve.samples) {
    lines.push_back(csv::format_double(p.rho) + "," + csv::format_double(p.mmse_estimate) + "," +
                    csv::format_double(p.std_error) + "," + std::to_string(p.trials));
  }
  csv::write_lines(path, lines);
}

CodeTransferCurve read_code_curve_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  CodeTransferCurve curve;
  bool have_rate = false;
  for (const std::string& comment : table.comments) {
    if (auto pos = comment.find("rate="); pos != std::string::npos) {
      curve.code_rate = std::stod(comment.substr(pos + 5));
      have_rate = true;
    }
    if (auto pos = comment.find("inner_iters="); pos != std::string::npos) {
      curve.inner_iterations = std::stoi(comment.substr(pos + 12));
    }
  }
  if (!have_rate) {
    throw std::invalid_argument("read_code_curve_csv: missing '# rate=' comment in " + path);
  }
  for (const auto& row : table.rows) {
    if (row.empty() || row[0] == "rho") {
      continue;
    }
    if (row.size() != 4) {
      throw std::invalid_argument("read_code_curve_csv: expected four columns in " + path);
    }
    CodePoint p;
    p.rho = std::stod(row[0]);
    p.mmse_estimate = std::stod(row[1]);
    p.std_error = std::stod(row[2]);
    p.trials = std::stoi(row[3]);
    curve.samples.push_back(p);
  }
  curve.validate();
  return curve;
}

SeCurve to_se_curve(const CodeTransferCurve& curve) {
  std::vector<double> rho, v;
  rho.reserve(curve.samples.size());
  v.reserve(curve.samples.size());
  for (const CodePoint& p : curve.samples) {
    rho.push_back(p.rho);
    v.push_back(p.mmse_estimate);
  }
  return curve_from_samples(rho, v);
}

TabulatedPhiHat to_phi_hat(const CodeTransferCurve& curve) {
  const SeCurve monotone = to_se_curve(curve);
  TabulatedPhiHat tab;
  tab.rho = monotone.rho;
  tab.v = monotone.v;
  return tab;
}

}  // namespace luis
