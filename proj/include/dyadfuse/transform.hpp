#pragma once

// Per-series normalization and timestep reduction (PAA / SAX).

#include <cstddef>
#include <span>
#include <vector>

#include "dyadfuse/core.hpp"

namespace dyadfuse::transform {

enum class SummaryMethod { Paa, Sax };

/// How SAX places its bin edges. EqualWidth splits [min, max] of the raw
/// series into equal bins. Gaussian uses standard-normal quantile breakpoints
/// on the series' own mean and standard deviation (classical SAX), kept for
/// comparison only.
enum class SaxBinning { EqualWidth, Gaussian };

struct SummarizationSpec {
  SummaryMethod method = SummaryMethod::Paa;
  std::size_t target_timesteps = 1;
  std::size_t alphabet_size = 16;  // SAX only
  SaxBinning binning = SaxBinning::EqualWidth;
};

/// z-scores one series with the population standard deviation; constant
/// series become all zeros.
std::vector<double> znorm(std::span<const double> series);

/// z-scores every (instance, channel) series of the tensor.
ModalityTensor znorm(const ModalityTensor& tensor);

/// Segment boundary k of a length-n series split into m fragments:
/// round(k * n / m) with halves rounded up.
std::size_t paa_boundary(std::size_t k, std::size_t n, std::size_t m);

std::vector<double> paa(std::span<const double> series,
                        std::size_t target_timesteps);

/// Equal-width edges e_0..e_V on [lo, hi]; e_0 == lo and e_V == hi exactly.
std::vector<double> equal_width_edges(double lo, double hi,
                                      std::size_t alphabet_size);

/// Bin index for `value`: the largest j with edges[j] <= value, capped at
/// V - 1. Values on an interior edge land in the upper bin.
std::size_t bin_index(std::span<const double> edges, double value);

/// PAA followed by discretization; each PAA mean is replaced by the midpoint
/// of its bin. Bins come from the original series, not the PAA output.
std::vector<double> sax(std::span<const double> series,
                        std::size_t target_timesteps, std::size_t alphabet_size,
                        SaxBinning binning = SaxBinning::EqualWidth);

/// Applies PAA or SAX independently to every (instance, channel) series.
ModalityTensor summarize_tensor(const ModalityTensor& tensor,
                                const SummarizationSpec& spec);

}  // namespace dyadfuse::transform
