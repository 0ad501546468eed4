#include "dyadfuse/transform.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numeric>

namespace dyadfuse::transform {

std::vector<double> znorm(std::span<const double> series) {
  std::vector<double> out(series.begin(), series.end());
  if (series.empty()) return out;
  const double n = static_cast<double>(series.size());
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : series) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (sd == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  for (double& v : out) v = (v - mean) / sd;
  return out;
}

ModalityTensor znorm(const ModalityTensor& tensor) {
  std::vector<double> data;
  data.reserve(tensor.data().size());
  for (std::size_t i = 0; i < tensor.instances(); ++i) {
    for (std::size_t c = 0; c < tensor.channels(); ++c) {
      auto z = znorm(tensor.series(i, c));
      data.insert(data.end(), z.begin(), z.end());
    }
  }
  return ModalityTensor(tensor.name(), tensor.instances(),
                        tensor.channel_names(), tensor.timesteps(),
                        std::move(data), tensor.sample_rate_hz());
}

std::size_t paa_boundary(std::size_t k, std::size_t n, std::size_t m) {
  // floor(k*n/m + 1/2) in integer arithmetic.
  return (2 * k * n + m) / (2 * m);
}

namespace {

void check_target(std::size_t n, std::size_t target) {
  if (target == 0 || target > n) {
    throw Error(ErrorKind::InvalidTargetLength,
                "target length " + std::to_string(target) +
                    " outside [1, " + std::to_string(n) + "]");
  }
}

}  // namespace

std::vector<double> paa(std::span<const double> series,
                        std::size_t target_timesteps) {
  const std::size_t n = series.size();
  check_target(n, target_timesteps);
  std::vector<double> out(target_timesteps);
  for (std::size_t k = 0; k < target_timesteps; ++k) {
    const std::size_t begin = paa_boundary(k, n, target_timesteps);
    const std::size_t end = paa_boundary(k + 1, n, target_timesteps);
    double sum = 0.0;
    for (std::size_t t = begin; t < end; ++t) sum += series[t];
    out[k] = sum / static_cast<double>(end - begin);
  }
  return out;
}

std::vector<double> equal_width_edges(double lo, double hi,
                                      std::size_t alphabet_size) {
  std::vector<double> edges(alphabet_size + 1);
  const double width = hi - lo;
  const double v = static_cast<double>(alphabet_size);
  for (std::size_t j = 0; j <= alphabet_size; ++j) {
    edges[j] = lo + width * (static_cast<double>(j) / v);
  }
  edges.front() = lo;
  edges.back() = hi;
  return edges;
}

std::size_t bin_index(std::span<const double> edges, double value) {
  const std::size_t bins = edges.size() - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  if (it == edges.begin()) return 0;
  return std::min<std::size_t>(static_cast<std::size_t>(it - edges.begin()) - 1,
                               bins - 1);
}

namespace {

std::vector<double> gaussian_sax(std::span<const double> series,
                                 std::vector<double> means,
                                 std::size_t alphabet_size) {
  const double n = static_cast<double>(series.size());
  const double mu = std::accumulate(series.begin(), series.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : series) ss += (v - mu) * (v - mu);
  const double sd = std::sqrt(ss / n);
  if (sd == 0.0) {
    std::fill(means.begin(), means.end(), mu);
    return means;
  }
  const boost::math::normal_distribution<double> unit;
  const double a = static_cast<double>(alphabet_size);
  // Breakpoints in z-space, padded with +-inf, and each bin's conditional mean.
  std::vector<double> breaks(alphabet_size + 1);
  breaks.front() = -std::numeric_limits<double>::infinity();
  breaks.back() = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < alphabet_size; ++j) {
    breaks[j] = boost::math::quantile(unit, static_cast<double>(j) / a);
  }
  auto density = [&](double z) {
    return std::isinf(z) ? 0.0 : boost::math::pdf(unit, z);
  };
  std::vector<double> centers(alphabet_size);
  for (std::size_t j = 0; j < alphabet_size; ++j) {
    centers[j] = a * (density(breaks[j]) - density(breaks[j + 1]));
  }
  for (double& m : means) {
    const double z = (m - mu) / sd;
    const auto it = std::upper_bound(breaks.begin() + 1, breaks.end() - 1, z);
    const std::size_t j = static_cast<std::size_t>(it - (breaks.begin() + 1));
    m = mu + sd * centers[j];
  }
  return means;
}

}  // namespace

std::vector<double> sax(std::span<const double> series,
                        std::size_t target_timesteps, std::size_t alphabet_size,
                        SaxBinning binning) {
  if (alphabet_size < 2) {
    throw Error(ErrorKind::InvalidTargetLength, "alphabet size must be >= 2");
  }
  std::vector<double> means = paa(series, target_timesteps);
  if (binning == SaxBinning::Gaussian) {
    return gaussian_sax(series, std::move(means), alphabet_size);
  }
  const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) {
    std::fill(means.begin(), means.end(), lo);
    return means;
  }
  const auto edges = equal_width_edges(lo, hi, alphabet_size);
  for (double& m : means) {
    const std::size_t j = bin_index(edges, m);
    m = 0.5 * (edges[j] + edges[j + 1]);
  }
  return means;
}

ModalityTensor summarize_tensor(const ModalityTensor& tensor,
                                const SummarizationSpec& spec) {
  check_target(tensor.timesteps(), spec.target_timesteps);
  std::vector<double> data;
  data.reserve(tensor.instances() * tensor.channels() * spec.target_timesteps);
  for (std::size_t i = 0; i < tensor.instances(); ++i) {
    for (std::size_t c = 0; c < tensor.channels(); ++c) {
      const auto s = tensor.series(i, c);
      auto reduced = spec.method == SummaryMethod::Paa
                         ? paa(s, spec.target_timesteps)
                         : sax(s, spec.target_timesteps, spec.alphabet_size,
                               spec.binning);
      data.insert(data.end(), reduced.begin(), reduced.end());
    }
  }
  const double rate = tensor.sample_rate_hz() *
                      static_cast<double>(spec.target_timesteps) /
                      static_cast<double>(tensor.timesteps());
  return ModalityTensor(tensor.name(), tensor.instances(),
                        tensor.channel_names(), spec.target_timesteps,
                        std::move(data), rate);
}

}  // namespace dyadfuse::transform
