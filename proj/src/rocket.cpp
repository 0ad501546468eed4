#include "dyadfuse/rocket.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dyadfuse/parallel.hpp"
#include "dyadfuse/rng.hpp"

namespace dyadfuse::classify {

namespace {

constexpr std::size_t kLengths[] = {7, 9, 11};

}  // namespace

KernelBank generate_kernels(std::size_t num, std::uint64_t seed,
                            std::size_t timesteps, std::size_t channels) {
  if (timesteps < 11) {
    throw Error(ErrorKind::SeriesTooShort,
                "kernel generation needs at least 11 timesteps, got " +
                    std::to_string(timesteps));
  }
  if (channels == 0) {
    throw Error(ErrorKind::ShapeMismatch, "kernel generation needs channels");
  }
  KernelBank bank;
  bank.seed = seed;
  bank.timesteps = timesteps;
  bank.channels = channels;
  bank.kernels.reserve(num);

  Rng rng(seed);
  std::vector<std::size_t> pool_of_channels(channels);
  for (std::size_t n = 0; n < num; ++n) {
    RocketKernel k;
    k.length = kLengths[rng.index(3)];

    const std::size_t subset_size =
        1 + rng.index(std::min(channels, kMaxKernelChannels));
    std::iota(pool_of_channels.begin(), pool_of_channels.end(), 0);
    for (std::size_t s = 0; s < subset_size; ++s) {
      const std::size_t pick = s + rng.index(channels - s);
      std::swap(pool_of_channels[s], pool_of_channels[pick]);
    }
    k.channel_subset.assign(pool_of_channels.begin(),
                            pool_of_channels.begin() + subset_size);
    std::sort(k.channel_subset.begin(), k.channel_subset.end());

    k.weights.resize(subset_size * k.length);
    for (double& w : k.weights) w = rng.normal();
    for (std::size_t s = 0; s < subset_size; ++s) {
      auto first = k.weights.begin() + s * k.length;
      auto last = first + k.length;
      const double mean =
          std::accumulate(first, last, 0.0) / static_cast<double>(k.length);
      for (auto it = first; it != last; ++it) *it -= mean;
    }

    k.bias = rng.uniform(-1.0, 1.0);

    const double exponent = std::log2(static_cast<double>(timesteps - 1) /
                                      static_cast<double>(k.length - 1));
    k.dilation = static_cast<std::size_t>(
        std::floor(std::pow(2.0, rng.uniform(0.0, exponent))));
    k.dilation = std::clamp<std::size_t>(k.dilation, 1,
                                         (timesteps - 1) / (k.length - 1));

    k.padded = rng.coin();
    bank.kernels.push_back(std::move(k));
  }
  return bank;
}

KernelResponse pool(std::span<const double> convolution) {
  KernelResponse r;
  r.max = -std::numeric_limits<double>::infinity();
  std::size_t positive = 0;
  for (double v : convolution) {
    positive += v > 0.0;
    r.max = std::max(r.max, v);
  }
  r.ppv = convolution.empty()
              ? 0.0
              : static_cast<double>(positive) /
                    static_cast<double>(convolution.size());
  return r;
}

KernelResponse apply_kernel(const RocketKernel& kernel,
                            const ModalityTensor& tensor,
                            std::size_t instance) {
  const std::size_t T = tensor.timesteps();
  const std::size_t out_len = kernel.output_length(T);
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(kernel.padding());
  const std::ptrdiff_t d = static_cast<std::ptrdiff_t>(kernel.dilation);
  const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(kernel.length);
  const std::ptrdiff_t span_width = (len - 1) * d;

  std::size_t positive = 0;
  double max = -std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < out_len; ++o) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(o) - pad;
    const bool interior =
        start >= 0 && start + span_width < static_cast<std::ptrdiff_t>(T);
    double sum = kernel.bias;
    for (std::size_t s = 0; s < kernel.channel_subset.size(); ++s) {
      const auto x = tensor.series(instance, kernel.channel_subset[s]);
      const auto w = kernel.channel_weights(s);
      if (interior) {
        const double* p = x.data() + start;
        for (std::ptrdiff_t j = 0; j < len; ++j) sum += w[j] * p[j * d];
      } else {
        for (std::ptrdiff_t j = 0; j < len; ++j) {
          const std::ptrdiff_t idx = start + j * d;
          if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(T)) {
            sum += w[j] * x[idx];
          }
        }
      }
    }
    positive += sum > 0.0;
    max = std::max(max, sum);
  }
  return {static_cast<double>(positive) / static_cast<double>(out_len), max};
}

FeatureMatrix rocket_transform(const ModalityTensor& tensor,
                               const KernelBank& bank, std::size_t jobs) {
  if (tensor.timesteps() != bank.timesteps ||
      tensor.channels() != bank.channels) {
    throw Error(ErrorKind::ShapeMismatch,
                "kernel bank built for " + std::to_string(bank.channels) +
                    "x" + std::to_string(bank.timesteps) +
                    " series, tensor is " + std::to_string(tensor.channels()) +
                    "x" + std::to_string(tensor.timesteps()));
  }
  FeatureMatrix features(tensor.instances(), 2 * bank.size());
  parallel_for(tensor.instances(), jobs, [&](std::size_t i) {
    for (std::size_t k = 0; k < bank.size(); ++k) {
      const auto r = apply_kernel(bank.kernels[k], tensor, i);
      features(i, 2 * k) = r.ppv;
      features(i, 2 * k + 1) = r.max;
    }
  });
  return features;
}

}  // namespace dyadfuse::classify
