#pragma once

#include <cstddef>
#include <optional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgprobe/kg/binning.hpp"
#include "kgprobe/knowledge/homophily.hpp"
#include "kgprobe/knowledge/scores.hpp"

namespace kgprobe::knowledge {

inline constexpr std::size_t kDefaultHistogramBins = 21;

/// Equal-width bins over [0, 1]; the last bin is closed on the right.
struct Histogram {
  std::vector<std::size_t> counts;

  std::size_t bins() const noexcept { return counts.size(); }
  double lower(std::size_t b) const { return static_cast<double>(b) / static_cast<double>(bins()); }
  double upper(std::size_t b) const { return static_cast<double>(b + 1) / static_cast<double>(bins()); }
  double center(std::size_t b) const { return (static_cast<double>(b) + 0.5) / static_cast<double>(bins()); }
  std::size_t total() const;
};

std::size_t histogram_bin(double value, std::size_t nbins);

/// Throws InputError when nbins < 2.
Histogram value_histogram(std::span<const std::optional<double>> values, std::size_t nbins = kDefaultHistogramBins);
Histogram score_histogram(const ScoreTable& scores, std::size_t nbins = kDefaultHistogramBins);

struct VariantDelta {
  std::vector<std::string> entities;
  std::vector<double> delta;  // temporal K - plain K
  double zero_mass_plain = 0.0;
  double zero_mass_temporal = 0.0;
  double one_mass_plain = 0.0;
  double one_mass_temporal = 0.0;
};

/// Compares tables over the same scored entities; throws InputError listing
/// the symmetric difference otherwise.
VariantDelta compare_variants(const ScoreTable& plain, const ScoreTable& temporal);

kg::BinCurve bin_by_property(std::span<const double> values, const ScoreTable& scores, std::size_t nbins,
                             kg::BinScale scale);

// CSV exports. Doubles use the shortest round-trip representation.
void write_scores_csv(std::ostream& out, const ScoreTable& scores, const HomophilyTable& homophily);
void write_histogram_csv(std::ostream& out, const std::string& series, const Histogram& h, bool header = true);
void write_bin_curve_csv(std::ostream& out, const std::string& series, const kg::BinCurve& curve, bool header = true);
void write_delta_csv(std::ostream& out, const VariantDelta& delta);

/// Reads a table written by write_scores_csv. Rows are matched to `g` by
/// entity name; entities without a row, or with an empty K, are unscored.
ScoreTable read_scores_csv(std::istream& in, const kg::KnowledgeGraph& g);

/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

std::string format_double(double x);
/// Quotes a CSV field when it holds a comma, quote or newline.
std::string csv_field(std::string_view text);

}  // namespace kgprobe::knowledge
