#pragma once

#include <string>
#include <vector>

#include "polyurn/config.hpp"

namespace polyurn {

struct CatalogueEntry {
    std::string name;
    std::string description;
};

/// Names of the built-in example schemes, in catalogue order.
std::vector<CatalogueEntry> catalogue_entries();

bool catalogue_has(const std::string& name);

/// Built-in configuration for one catalogue entry; throws ConfigError for an
/// unknown name.
ExperimentConfig catalogue_config(const std::string& name);

} // namespace polyurn
