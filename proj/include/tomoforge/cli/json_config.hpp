#pragma once

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace tomoforge::cli {

/// CLI11 config formatter for JSON files. Top-level objects named after a
/// subcommand open that subcommand's section; scalars become option values,
/// arrays become repeated values and booleans set flags.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

  /// The resolved options of `app` and every parsed subcommand.
  static nlohmann::json to_json(const CLI::App* app, bool default_also);
};

}  // namespace tomoforge::cli
