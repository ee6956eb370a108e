#include "kgprobe/kg/binning.hpp"

#include <algorithm>
#include <cmath>

#include "kgprobe/error.hpp"

namespace kgprobe::kg {

BinCurve bin_by_property(std::span<const double> values, std::span<const std::optional<double>> scores,
                         std::size_t nbins, BinScale scale) {
  if (nbins == 0) throw InputError("bin count must be at least 1");
  if (values.size() != scores.size()) throw InputError("property values and scores differ in length");

  BinCurve curve;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!scores[i] || !std::isfinite(values[i])) continue;
    double x = values[i];
    if (scale == BinScale::log) {
      if (x <= 0.0) {
        ++curve.excluded_nonpositive;
        continue;
      }
      x = std::log10(x);
    }
    xs.push_back(x);
    ys.push_back(*scores[i]);
  }
  curve.considered = xs.size();

  const auto back = [scale](double t) { return scale == BinScale::log ? std::pow(10.0, t) : t; };
  double lo = 0.0, hi = 0.0;
  if (!xs.empty()) {
    auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    lo = *mn;
    hi = *mx;
  }
  const double width = (hi - lo) / static_cast<double>(nbins);

  std::vector<std::vector<double>> members(nbins);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::size_t b = 0;
    if (width > 0.0) b = std::min(nbins - 1, static_cast<std::size_t>((xs[i] - lo) / width));
    members[b].push_back(ys[i]);
  }

  curve.bins.resize(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    auto& bin = curve.bins[b];
    const double a = lo + width * static_cast<double>(b);
    const double z = b + 1 == nbins ? hi : lo + width * static_cast<double>(b + 1);
    bin.lower = back(a);
    bin.upper = back(z);
    bin.center = back(0.5 * (a + z));
    bin.count = members[b].size();
    if (bin.count == 0) continue;
    double s = 0.0;
    for (double y : members[b]) s += y;
    const double mean = s / static_cast<double>(bin.count);
    double ss = 0.0;
    for (double y : members[b]) ss += (y - mean) * (y - mean);
    bin.mean = mean;
    bin.stddev = std::sqrt(ss / static_cast<double>(bin.count));
  }
  return curve;
}

}  // namespace kgprobe::kg
