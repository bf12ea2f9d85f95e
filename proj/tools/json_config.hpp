#pragma once

// CLI11 config reader/writer for JSON documents. Nested objects become
// sections, so {"train": {"sweeps": 10}} sets `train --sweeps 10`. Keys that
// match no option are left for the app's extras policy.

#include <istream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace tspra::cli {

class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json doc = nlohmann::json::parse(input, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw CLI::ConversionError("config", "not a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(doc, {}, items);
    return items;
  }

  static nlohmann::json dump(const CLI::App* app, bool default_also) {
    nlohmann::json out = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->get_type_size() == 0) {
        out[name] = opt->count() > 0 && opt->as<bool>();
      } else if (opt->count() > 0) {
        out[name] = opt->as<std::string>();
      } else if (default_also && !opt->get_default_str().empty()) {
        out[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      if (sub->parsed() || default_also) out[sub->get_name()] = dump(sub, default_also);
    }
    return out;
  }

 private:
  static void collect(const nlohmann::json& node, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : node.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        // An empty section still activates a configurable subcommand.
        CLI::ConfigItem open;
        open.parents = nested;
        open.name = "++";
        items.push_back(open);
        collect(value, nested, items);
        CLI::ConfigItem close;
        close.parents = nested;
        close.name = "--";
        items.push_back(close);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }
};

}  // namespace tspra::cli
