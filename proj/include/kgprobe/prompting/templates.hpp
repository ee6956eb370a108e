#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "kgprobe/kg/triplet.hpp"

namespace kgprobe::prompting {

inline constexpr std::string_view kSubjectPlaceholder = "{sub}";
inline constexpr std::string_view kObjectPlaceholder = "{obj}";

/// relation -> statement template with exactly one {sub} and one {obj}.
class TemplateMap {
 public:
  TemplateMap() = default;

  /// Throws InputError unless the template has each placeholder exactly once.
  void add(std::string relation, std::string templ);

  const std::string* find(std::string_view relation) const;
  std::size_t size() const noexcept { return templates_.size(); }

  /// Throws InputError naming every relation in `triplets` without a template.
  void require_all(std::span<const kg::Triplet> triplets) const;

  static TemplateMap from_json(const nlohmann::json& object);
  static TemplateMap load(const std::filesystem::path& path);

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

std::string instantiate_statement(const kg::Triplet& t, const TemplateMap& templates);

/// Base statement + " on YYYY-MM-DD". Throws InputError without a timestamp.
std::string instantiate_temporal_statement(const kg::Triplet& t, const TemplateMap& templates);

}  // namespace kgprobe::prompting
