#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evanskit/model.hpp"

namespace evanskit {

/// A registry entry: a conservation-law model with its default shock, or
/// (for the glancing fixture) only the 2x2 model family and its tau map.
struct SystemSpec {
  std::string name;
  std::optional<SystemModel> model;
  Vec u_minus;
  Vec u_plus;
  std::map<std::string, double> params;
  std::function<double(double)> tau;  // glancing fixture only
};

/// Names known to get(), in registry order.
std::vector<std::string> system_names();

/// Builds a registry entry; `overrides` replaces named parameters. Unknown
/// names raise ErrorKind::unknown_system, unknown parameters ErrorKind::config.
SystemSpec get_system(const std::string& name,
                      const std::map<std::string, double>& overrides = {});

/// Default parameters of a registry entry.
std::map<std::string, double> default_params(const std::string& name);

}  // namespace evanskit
