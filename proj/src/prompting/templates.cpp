#include "kgprobe/prompting/templates.hpp"

#include <fstream>
#include <set>

#include "kgprobe/error.hpp"

namespace kgprobe::prompting {
namespace {

std::size_t count_of(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size()))
    ++n;
  return n;
}

}  // namespace

void TemplateMap::add(std::string relation, std::string templ) {
  if (count_of(templ, kSubjectPlaceholder) != 1 || count_of(templ, kObjectPlaceholder) != 1)
    throw InputError("template for relation \"" + relation + "\" must contain {sub} and {obj} exactly once: \"" +
                     templ + "\"");
  templates_.insert_or_assign(std::move(relation), std::move(templ));
}

const std::string* TemplateMap::find(std::string_view relation) const {
  auto it = templates_.find(relation);
  return it == templates_.end() ? nullptr : &it->second;
}

void TemplateMap::require_all(std::span<const kg::Triplet> triplets) const {
  std::set<std::string> missing;
  for (const auto& t : triplets)
    if (!find(t.relation)) missing.insert(t.relation);
  if (missing.empty()) return;
  std::string names;
  for (const auto& m : missing) names += (names.empty() ? "\"" : ", \"") + m + "\"";
  throw InputError("no template for relation(s): " + names);
}

TemplateMap TemplateMap::from_json(const nlohmann::json& object) {
  if (!object.is_object()) throw InputError("template file must hold a JSON object");
  TemplateMap map;
  for (const auto& [relation, value] : object.items()) {
    if (!value.is_string()) throw InputError("template for relation \"" + relation + "\" is not a string");
    map.add(relation, value.get<std::string>());
  }
  return map;
}

TemplateMap TemplateMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open template file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("invalid template JSON in " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

std::string instantiate_statement(const kg::Triplet& t, const TemplateMap& templates) {
  const std::string* templ = templates.find(t.relation);
  if (!templ) throw InputError("no template for relation \"" + t.relation + "\"");
  // Substitute from a copy of the template so entity names containing
  // placeholder text are left untouched.
  const auto sub = templ->find(kSubjectPlaceholder);
  const auto obj = templ->find(kObjectPlaceholder);
  std::string out;
  out.reserve(templ->size() + t.head.size() + t.tail.size());
  const bool sub_first = sub < obj;
  const auto first = sub_first ? sub : obj;
  const auto second = sub_first ? obj : sub;
  const std::string& first_value = sub_first ? t.head : t.tail;
  const std::string& second_value = sub_first ? t.tail : t.head;
  out.append(*templ, 0, first);
  out += first_value;
  const auto mid = first + 5;  // both placeholders are five characters
  out.append(*templ, mid, second - mid);
  out += second_value;
  out.append(*templ, second + 5);
  return out;
}

std::string instantiate_temporal_statement(const kg::Triplet& t, const TemplateMap& templates) {
  if (!t.timestamp)
    throw InputError("temporal statement requested for timestamp-less triplet (" + t.head + ", " + t.relation +
                     ", " + t.tail + ")");
  return instantiate_statement(t, templates) + " on " + kg::format_date(*t.timestamp);
}

}  // namespace kgprobe::prompting
