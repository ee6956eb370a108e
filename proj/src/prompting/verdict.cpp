#include "kgprobe/prompting/verdict.hpp"

#include <cctype>
#include <string>

namespace kgprobe::prompting {

int parse_verdict(std::string_view raw) {
  auto is_alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
  std::size_t b = 0;
  while (b < raw.size() && !is_alpha(raw[b])) ++b;
  std::size_t e = b;
  while (e < raw.size() && is_alpha(raw[e])) ++e;
  std::string token;
  for (std::size_t i = b; i < e; ++i) token += static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i])));
  if (token == "true") return 1;
  if (token == "false") return 0;
  std::string shown(raw.substr(0, 80));
  throw UnparseableResponse("response does not start with True/False: \"" + shown + "\"");
}

std::uint64_t stable_hash(std::uint64_t seed, std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  constexpr std::uint64_t prime = 0x100000001b3ULL;
  for (int i = 0; i < 8; ++i) {
    h ^= (seed >> (8 * i)) & 0xffu;
    h *= prime;
  }
  for (unsigned char c : text) {
    h ^= c;
    h *= prime;
  }
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

int mock_verdict(std::string_view statement, std::uint64_t seed, double target_rate) {
  const double u = static_cast<double>(stable_hash(seed, statement) >> 11) * 0x1.0p-53;
  return u < target_rate ? 1 : 0;
}

}  // namespace kgprobe::prompting
