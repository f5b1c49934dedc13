#include "vexp/error.hpp"

namespace vexp {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out = "invalid configuration";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i == 0 ? ": " : "; ") + items[i];
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

}  // namespace vexp
