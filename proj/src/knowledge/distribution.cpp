#include "kgprobe/knowledge/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "kgprobe/error.hpp"

namespace kgprobe::knowledge {

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::size_t Histogram::total() const {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::size_t histogram_bin(double value, std::size_t nbins) {
  const double scaled = value * static_cast<double>(nbins);
  if (!(scaled > 0.0)) return 0;
  return std::min(nbins - 1, static_cast<std::size_t>(scaled));
}

Histogram value_histogram(std::span<const std::optional<double>> values, std::size_t nbins) {
  if (nbins < 2) throw InputError("histogram needs at least 2 bins");
  Histogram h;
  h.counts.assign(nbins, 0);
  for (const auto& v : values)
    if (v) ++h.counts[histogram_bin(*v, nbins)];
  return h;
}

Histogram score_histogram(const ScoreTable& scores, std::size_t nbins) {
  auto values = scores.values();
  return value_histogram(values, nbins);
}

VariantDelta compare_variants(const ScoreTable& plain, const ScoreTable& temporal) {
  std::map<std::string, double> a, b;
  for (std::size_t i = 0; i < plain.size(); ++i)
    if (plain.scores[i].knowledgeability) a[plain.entities[i]] = *plain.scores[i].knowledgeability;
  for (std::size_t i = 0; i < temporal.size(); ++i)
    if (temporal.scores[i].knowledgeability) b[temporal.entities[i]] = *temporal.scores[i].knowledgeability;

  std::vector<std::string> only;
  for (const auto& [k, v] : a)
    if (!b.count(k)) only.push_back(k);
  for (const auto& [k, v] : b)
    if (!a.count(k)) only.push_back(k);
  if (!only.empty()) {
    std::sort(only.begin(), only.end());
    std::string list;
    for (std::size_t i = 0; i < only.size() && i < 20; ++i) list += (i ? ", " : "") + only[i];
    if (only.size() > 20) list += ", ...";
    throw InputError("variant tables cover different entities (" + std::to_string(only.size()) + "): " + list);
  }

  VariantDelta d;
  // Report in the plain table's entity order.
  for (std::size_t i = 0; i < plain.size(); ++i) {
    if (!plain.scores[i].knowledgeability) continue;
    const auto& name = plain.entities[i];
    const double p = a[name], t = b[name];
    d.entities.push_back(name);
    d.delta.push_back(t - p);
    d.zero_mass_plain += p == 0.0;
    d.zero_mass_temporal += t == 0.0;
    d.one_mass_plain += p == 1.0;
    d.one_mass_temporal += t == 1.0;
  }
  if (!d.entities.empty()) {
    const double n = static_cast<double>(d.entities.size());
    d.zero_mass_plain /= n;
    d.zero_mass_temporal /= n;
    d.one_mass_plain /= n;
    d.one_mass_temporal /= n;
  }
  return d;
}

kg::BinCurve bin_by_property(std::span<const double> values, const ScoreTable& scores, std::size_t nbins,
                             kg::BinScale scale) {
  auto s = scores.values();
  return kg::bin_by_property(values, s, nbins, scale);
}

void write_scores_csv(std::ostream& out, const ScoreTable& scores, const HomophilyTable& homophily) {
  out << "entity,variant,K,n_probed,n_failed,H\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores.scores[i];
    out << csv_field(scores.entities[i]) << ',' << to_string(scores.variant) << ','
        << (s.knowledgeability ? format_double(*s.knowledgeability) : "") << ',' << s.n_probed << ','
        << s.n_failed << ',';
    if (i < homophily.values.size() && homophily.values[i]) out << format_double(*homophily.values[i]);
    out << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const std::string& series, const Histogram& h, bool header) {
  if (header) out << "series,bin,lower,upper,center,count\n";
  for (std::size_t b = 0; b < h.bins(); ++b)
    out << series << ',' << b << ',' << format_double(h.lower(b)) << ',' << format_double(h.upper(b)) << ','
        << format_double(h.center(b)) << ',' << h.counts[b] << '\n';
}

void write_bin_curve_csv(std::ostream& out, const std::string& series, const kg::BinCurve& curve, bool header) {
  if (header) out << "series,bin,lower,upper,center,mean,std,count\n";
  for (std::size_t b = 0; b < curve.bins.size(); ++b) {
    const auto& bin = curve.bins[b];
    out << series << ',' << b << ',' << format_double(bin.lower) << ',' << format_double(bin.upper) << ','
        << format_double(bin.center) << ',' << (bin.mean ? format_double(*bin.mean) : "") << ','
        << format_double(bin.stddev) << ',' << bin.count << '\n';
  }
}

void write_delta_csv(std::ostream& out, const VariantDelta& delta) {
  out << "entity,delta_K\n";
  for (std::size_t i = 0; i < delta.entities.size(); ++i)
    out << csv_field(delta.entities[i]) << ',' << format_double(delta.delta[i]) << '\n';
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

ScoreTable read_scores_csv(std::istream& in, const kg::KnowledgeGraph& g) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("scores file is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "entity" || header[2] != "K")
    throw InputError("scores file must start with an entity,variant,K header");
  std::vector<std::optional<double>> values(g.num_entities());
  Variant variant = Variant::plain;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() < 3) throw ParseError(lineno, "expected at least 3 fields");
    const auto id = g.find_entity(f[0]);
    if (!id) throw ParseError(lineno, "unknown entity \"" + f[0] + "\"");
    if (f[1] == "temporal") variant = Variant::temporal;
    if (f[2].empty()) continue;
    double k = 0.0;
    auto [ptr, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), k);
    if (ec != std::errc() || ptr != f[2].data() + f[2].size() || !(k >= 0.0 && k <= 1.0))
      throw ParseError(lineno, "K must be a number in [0, 1], got \"" + f[2] + "\"");
    values[*id] = k;
  }
  return score_table_from_values(g, values, variant);
}

}  // namespace kgprobe::knowledge
