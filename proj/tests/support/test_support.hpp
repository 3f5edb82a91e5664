#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "roundtax/cli.hpp"
#include "roundtax/distributions.hpp"
#include "roundtax/philox.hpp"

namespace roundtax::testing {

inline std::string data_file(const std::string& name) { return std::string(ROUNDTAX_DATA_DIR) + "/" + name; }

/// A fresh directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("roundtax-test-" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Random integer weights over 100 endings and over basket sizes 1..max_basket.
/// Some endings get zero weight so sparse supports are covered too.
inline StoreProfile random_profile(std::uint64_t seed, int max_basket) {
  CounterStream rng(seed, 0xC0FFEE);
  Vector<Rational> endings(100);
  std::int64_t total = 0;
  for (int r = 0; r < 100; ++r) {
    const std::int64_t w = rng.next_u32() % 4 == 0 ? 0 : 1 + rng.next_u32() % 50;
    endings[r] = w;
    total += w;
  }
  if (total == 0) {
    endings[99] = 1;
    total = 1;
  }
  endings /= Rational(total);

  Vector<Rational> baskets(max_basket);
  std::int64_t btotal = 0;
  for (int k = 0; k < max_basket; ++k) {
    const std::int64_t w = 1 + rng.next_u32() % 20;
    baskets[k] = w;
    btotal += w;
  }
  baskets /= Rational(btotal);

  return StoreProfile{kStoreTypes[seed % 3], EndingDistribution(endings), BasketSizeDistribution(baskets), 1'000'000,
                      Rational(1)};
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliRun run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"roundtax"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace roundtax::testing
