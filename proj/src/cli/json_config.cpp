#include "tomoforge/cli/json_config.hpp"

#include "tomoforge/text.hpp"

namespace tomoforge::cli {

namespace {

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_double(v.get<double>());
  throw CLI::ConversionError("unsupported JSON value " + v.dump());
}

void collect(const nlohmann::json& obj, std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object()) {
      parents.push_back(key);
      out.push_back({parents, "++", {}});
      collect(value, parents, out);
      out.push_back({parents, "--", {}});
      parents.pop_back();
      continue;
    }
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = key;
    if (value.is_array()) {
      for (const auto& e : value) item.inputs.push_back(scalar_text(e));
    } else if (!value.is_null()) {
      item.inputs.push_back(scalar_text(value));
    }
    out.push_back(std::move(item));
  }
}

nlohmann::json option_value(const CLI::Option* opt, bool default_also) {
  if (opt->count() == 0) {
    if (!default_also || opt->get_default_str().empty()) return nullptr;
    return opt->get_default_str();
  }
  if (opt->get_type_size() == 0) return true;
  const auto results = opt->results();
  if (opt->get_expected_max() <= 1 && results.size() == 1) return results.front();
  return results;
}

}  // namespace

nlohmann::json JsonConfig::to_json(const CLI::App* app, bool default_also) {
  nlohmann::json j = nlohmann::json::object();
  for (const CLI::Option* opt : app->get_options({})) {
    if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
    auto v = option_value(opt, default_also);
    if (!v.is_null()) j[opt->get_lnames().front()] = std::move(v);
  }
  for (const CLI::App* sub : app->get_subcommands({})) {
    if (sub->count() > 0) j[sub->get_name()] = to_json(sub, default_also);
  }
  return j;
}

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
  return to_json(app, default_also).dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(input);
  } catch (const nlohmann::json::parse_error& e) {
    throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
  std::vector<CLI::ConfigItem> items;
  std::vector<std::string> parents;
  collect(j, parents, items);
  return items;
}

}  // namespace tomoforge::cli
