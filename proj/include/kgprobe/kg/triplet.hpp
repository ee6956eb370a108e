#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgprobe::kg {

using Date = std::chrono::year_month_day;

/// Strict ISO-8601 day parser (YYYY-MM-DD). Returns nullopt for anything else,
/// including calendar-invalid dates such as 2021-02-30.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);

struct Triplet {
  std::string head;
  std::string relation;
  std::string tail;
  std::optional<Date> timestamp;

  bool operator==(const Triplet&) const = default;
};

using TripletSet = std::vector<Triplet>;

/// Column positions of head/relation/tail within the first three fields.
/// The optional timestamp is always the fourth field.
struct ColumnSchema {
  std::size_t head = 0;
  std::size_t relation = 1;
  std::size_t tail = 2;

  /// Parses a permutation of "hrt", e.g. "htr" for head, tail, relation files.
  static ColumnSchema parse(std::string_view spec);
};

/// Reads tab-separated triplets. Blank lines and lines starting with '#' are
/// skipped; duplicates are kept. Throws ParseError with the offending line.
TripletSet parse_triplets(std::istream& in, const ColumnSchema& schema = {});
TripletSet read_triplet_file(const std::filesystem::path& path, const ColumnSchema& schema = {});

/// Writes triplets in canonical head/relation/tail[/date] order.
void write_triplets(std::ostream& out, const TripletSet& triplets);

}  // namespace kgprobe::kg
