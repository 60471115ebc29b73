#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace kdeais {

/// One root seed per run, forked into named substreams so that adding or
/// removing a consumer never perturbs the sample path of the others.
class RngForker {
 public:
  explicit RngForker(std::uint64_t root_seed) : root_(root_seed) {}

  std::uint64_t root() const { return root_; }

  /// Derived seed for a named substream, optionally indexed (e.g. per
  /// iteration). FNV-1a over the name mixed through splitmix64.
  std::uint64_t derive(std::string_view name, std::uint64_t index = 0) const {
    std::uint64_t h = 1469598103934665603ull;
    for (char ch : name) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
    return mix(mix(root_ ^ h) + index);
  }

  std::mt19937_64 stream(std::string_view name, std::uint64_t index = 0) const {
    return std::mt19937_64(derive(name, index));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t root_;
};

}  // namespace kdeais
