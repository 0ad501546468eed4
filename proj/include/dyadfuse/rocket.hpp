#pragma once

// Random convolutional kernels and the PPV/max feature transform.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dyadfuse/core.hpp"

namespace dyadfuse::classify {

using FeatureMatrix = Eigen::MatrixXd;  // rows are instances

struct RocketKernel {
  std::size_t length = 9;
  // channel_subset.size() blocks of `length` weights, in subset order.
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t dilation = 1;
  bool padded = false;
  std::vector<std::size_t> channel_subset;

  /// Zero-padding added on each side when `padded`: (length-1)*dilation/2.
  std::size_t padding() const {
    return padded ? (length - 1) * dilation / 2 : 0;
  }
  std::size_t output_length(std::size_t timesteps) const {
    return timesteps + 2 * padding() - (length - 1) * dilation;
  }
  std::span<const double> channel_weights(std::size_t k) const {
    return std::span<const double>(weights).subspan(k * length, length);
  }
};

struct KernelBank {
  std::vector<RocketKernel> kernels;
  std::uint64_t seed = 0;
  std::size_t timesteps = 0;
  std::size_t channels = 0;

  std::size_t size() const noexcept { return kernels.size(); }
};

constexpr std::size_t kDefaultNumKernels = 10000;
constexpr std::size_t kMaxKernelChannels = 9;

/// Draws `num` kernels for series of the given shape. Lengths are uniform on
/// {7, 9, 11}; weights are standard normal, centered per channel; bias is
/// uniform on [-1, 1]; dilation is floor(2^x) with x uniform on
/// [0, log2((T-1)/(length-1))]; padding is a fair coin; the channel subset
/// has a uniform size in 1..min(C, 9), drawn without replacement.
KernelBank generate_kernels(std::size_t num, std::uint64_t seed,
                            std::size_t timesteps, std::size_t channels);

struct KernelResponse {
  double ppv = 0.0;
  double max = 0.0;
};

/// Pools one convolution output into (fraction of values > 0, maximum).
KernelResponse pool(std::span<const double> convolution);

/// Convolution of one kernel over one instance of the tensor.
KernelResponse apply_kernel(const RocketKernel& kernel,
                            const ModalityTensor& tensor, std::size_t instance);

/// [instances x 2*kernels] features; columns 2k and 2k+1 hold kernel k's PPV
/// and max.
FeatureMatrix rocket_transform(const ModalityTensor& tensor,
                               const KernelBank& bank, std::size_t jobs = 1);

}  // namespace dyadfuse::classify
