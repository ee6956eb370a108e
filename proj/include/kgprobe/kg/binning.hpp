#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace kgprobe::kg {

enum class BinScale { linear, log };

struct PropertyBin {
  double lower = 0.0;   // property value at the bin edges (original scale)
  double upper = 0.0;
  double center = 0.0;  // midpoint in transformed space, mapped back
  std::optional<double> mean;  // empty bins have no mean
  double stddev = 0.0;         // population standard deviation
  std::size_t count = 0;
};

struct BinCurve {
  std::vector<PropertyBin> bins;
  std::size_t considered = 0;           // entities with a value and a score
  std::size_t excluded_nonpositive = 0; // log scale only
};

/// Groups entities into equal-width bins of `values` (log10-transformed for
/// BinScale::log) and reports score statistics per bin. Entities without a
/// score are ignored. Throws InputError when nbins == 0 or sizes differ.
BinCurve bin_by_property(std::span<const double> values, std::span<const std::optional<double>> scores,
                         std::size_t nbins, BinScale scale);

}  // namespace kgprobe::kg
