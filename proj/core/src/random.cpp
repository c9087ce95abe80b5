#include "graphforge/random.hpp"

namespace graphforge {

std::uint64_t derive_seed(std::uint64_t root, std::string_view component) {
  return mix64(mix64(root) ^ fnv1a(component));
}

}  // namespace graphforge
