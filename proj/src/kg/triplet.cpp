#include "kgprobe/kg/triplet.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "kgprobe/error.hpp"

namespace kgprobe::kg {
namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d))
    return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

ColumnSchema ColumnSchema::parse(std::string_view spec) {
  if (spec.size() != 3) throw InputError("column schema must be a permutation of \"hrt\", got \"" + std::string(spec) + "\"");
  ColumnSchema schema;
  std::array<bool, 3> seen{};
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t* slot = nullptr;
    int which = -1;
    switch (spec[i]) {
      case 'h': slot = &schema.head; which = 0; break;
      case 'r': slot = &schema.relation; which = 1; break;
      case 't': slot = &schema.tail; which = 2; break;
      default: break;
    }
    if (!slot || seen[which]) throw InputError("column schema must be a permutation of \"hrt\", got \"" + std::string(spec) + "\"");
    seen[which] = true;
    *slot = i;
  }
  return schema;
}

TripletSet parse_triplets(std::istream& in, const ColumnSchema& schema) {
  TripletSet out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim(view).empty() || view.front() == '#') continue;

    std::array<std::string_view, 4> fields;
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
      auto tab = view.find('\t', start);
      if (n == fields.size()) throw ParseError(lineno, "expected 3 or 4 tab-separated fields, got more");
      fields[n++] = view.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (n < 3) throw ParseError(lineno, "expected 3 or 4 tab-separated fields, got " + std::to_string(n));

    Triplet t;
    t.head = std::string(trim(fields[schema.head]));
    t.relation = std::string(trim(fields[schema.relation]));
    t.tail = std::string(trim(fields[schema.tail]));
    if (t.head.empty() || t.relation.empty() || t.tail.empty())
      throw ParseError(lineno, "empty head, relation or tail");
    if (n == 4) {
      auto raw = trim(fields[3]);
      auto date = parse_date(raw);
      if (!date) throw ParseError(lineno, "invalid date \"" + std::string(raw) + "\" (expected YYYY-MM-DD)");
      t.timestamp = *date;
    }
    out.push_back(std::move(t));
  }
  return out;
}

TripletSet read_triplet_file(const std::filesystem::path& path, const ColumnSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open triplet file " + path.string());
  try {
    return parse_triplets(in, schema);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.reason() + " in " + path.string());
  }
}

void write_triplets(std::ostream& out, const TripletSet& triplets) {
  for (const auto& t : triplets) {
    out << t.head << '\t' << t.relation << '\t' << t.tail;
    if (t.timestamp) out << '\t' << format_date(*t.timestamp);
    out << '\n';
  }
}

}  // namespace kgprobe::kg
