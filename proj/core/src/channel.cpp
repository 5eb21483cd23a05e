#include "luislab/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "luislab/csvio.hpp"
#include "luislab/rng.hpp"

namespace luis {

void ChannelSpectrum::validate() const {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("spectrum: dimensions must be positive");
  const int t = std::min(rows, cols);
  if (singular_values.size() != t)
    throw std::invalid_argument("spectrum: expected min(m, n) singular values");
  double sumsq = 0.0;
  for (int i = 0; i < t; ++i) {
    if (!(singular_values[i] >= 0)) throw std::invalid_argument("spectrum: negative singular value");
    if (i > 0 && singular_values[i] > singular_values[i - 1] * (1 + 1e-12))
      throw std::invalid_argument("spectrum: singular values must be nonincreasing");
    sumsq += singular_values[i] * singular_values[i];
  }
  if (std::abs(sumsq - cols) > 1e-6 * cols)
    throw std::invalid_argument("spectrum: squared singular values must sum to n");
}

ChannelSpectrum make_kappa_spectrum(int m, int n, double kappa) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("make_kappa_spectrum: m, n must be positive");
  if (!(kappa >= 1.0)) throw std::invalid_argument("make_kappa_spectrum: kappa must be >= 1");
  const int t = std::min(m, n);
  // d_i = c * kappa^{(T-i)/T}, normalized so sum d_i^2 = n.
  Eigen::VectorXd d(t);
  double sumsq = 0.0;
  for (int i = 0; i < t; ++i) {
    d[i] = std::pow(kappa, static_cast<double>(t - 1 - i) / t);
    sumsq += d[i] * d[i];
  }
  d *= std::sqrt(n / sumsq);
  ChannelSpectrum spectrum{m, n, std::move(d)};
  spectrum.validate();
  return spectrum;
}

void write_spectrum_csv(const std::string& path, const ChannelSpectrum& spectrum) {
  std::vector<std::string> lines;
  lines.push_back("# luislab spectrum v" + std::string(csv::kSchemaVersion));
  lines.push_back("# " + std::to_string(spectrum.rows) + "," + std::to_string(spectrum.cols));
  for (int i = 0; i < spectrum.rank(); ++i)
    lines.push_back(csv::format_double(spectrum.singular_values[i]));
  csv::write_lines(path, lines);
}

ChannelSpectrum read_spectrum_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  int m = 0, n = 0;
  for (const auto& c : table.comments) {
    if (std::sscanf(c.c_str(), "%d,%d", &m, &n) == 2) break;
  }
  if (m <= 0 || n <= 0)
    throw std::runtime_error("spectrum csv: missing '# m,n' header in " + path);
  ChannelSpectrum spectrum;
  spectrum.rows = m;
  spectrum.cols = n;
  spectrum.singular_values.resize(static_cast<Eigen::Index>(table.rows.size()));
  for (size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != 1)
      throw std::runtime_error("spectrum csv: expected one value per line in " + path);
    spectrum.singular_values[static_cast<Eigen::Index>(i)] = std::stod(table.rows[i][0]);
  }
  spectrum.validate();
  return spectrum;
}

Eigen::VectorXcd ChannelInstance::mul_left(const Eigen::VectorXcd& v) const {
  return left.size() == 0 ? v : Eigen::VectorXcd(left * v);
}
Eigen::VectorXcd ChannelInstance::mul_left_adjoint(const Eigen::VectorXcd& v) const {
  return left.size() == 0 ? v : Eigen::VectorXcd(left.adjoint() * v);
}
Eigen::VectorXcd ChannelInstance::mul_right(const Eigen::VectorXcd& v) const {
  return right.size() == 0 ? v : Eigen::VectorXcd(right * v);
}
Eigen::VectorXcd ChannelInstance::mul_right_adjoint(const Eigen::VectorXcd& v) const {
  return right.size() == 0 ? v : Eigen::VectorXcd(right.adjoint() * v);
}

Eigen::VectorXcd ChannelInstance::apply(const Eigen::VectorXcd& x) const {
  if (x.size() != spectrum.cols) throw std::invalid_argument("apply: x has wrong length");
  const int t = spectrum.rank();
  Eigen::VectorXcd vx = mul_right(x);
  Eigen::VectorXcd scaled = Eigen::VectorXcd::Zero(spectrum.rows);
  scaled.head(t) = spectrum.singular_values.head(t).cast<std::complex<double>>().cwiseProduct(vx.head(t));
  return mul_left_adjoint(scaled);
}

Eigen::MatrixXcd ChannelInstance::dense() const {
  Eigen::MatrixXcd a(spectrum.rows, spectrum.cols);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(spectrum.cols);
  for (int j = 0; j < spectrum.cols; ++j) {
    e[j] = 1.0;
    a.col(j) = apply(e);
    e[j] = 0.0;
  }
  return a;
}

Eigen::MatrixXcd sample_haar_unitary(int dim, std::mt19937_64& gen) {
  if (dim <= 0) throw std::invalid_argument("sample_haar_unitary: dim must be positive");
  Eigen::MatrixXcd g = rng::cgauss_matrix(gen, dim, dim);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  // Phase fix: scale column j by the phase of R_jj so the effective R has a
  // real positive diagonal; without it the QR output is not Haar.
  const Eigen::MatrixXcd& qrmat = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const std::complex<double> rjj = qrmat(j, j);
    const double mag = std::abs(rjj);
    const std::complex<double> phase = mag > 0 ? rjj / mag : std::complex<double>(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

ChannelInstance sample_channel(const ChannelSpectrum& spectrum, double noise_variance,
                               std::uint64_t seed, Rotation rotation) {
  spectrum.validate();
  if (!(noise_variance > 0)) throw std::invalid_argument("sample_channel: noise variance must be positive");
  ChannelInstance channel;
  channel.spectrum = spectrum;
  channel.noise_variance = noise_variance;
  if (rotation != Rotation::identity) {
    std::mt19937_64 gen = rng::make_engine(rng::derive(seed, rng::Stream::channel));
    if (rotation == Rotation::haar) channel.left = sample_haar_unitary(spectrum.rows, gen);
    channel.right = sample_haar_unitary(spectrum.cols, gen);
  }
  return channel;
}

Eigen::VectorXcd apply_channel(const ChannelInstance& channel, const Eigen::VectorXcd& x,
                               std::mt19937_64& noise_gen) {
  Eigen::VectorXcd y = channel.apply(x);
  Eigen::VectorXcd w(y.size());
  rng::fill_cgauss(noise_gen, channel.noise_variance, w);
  return y + w;
}

}  // namespace luis
