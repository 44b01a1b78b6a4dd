#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "matbridge/dataset.hpp"
#include "matbridge/errors.hpp"
#include "matbridge/rng.hpp"

namespace matbridge {

// Three-way partition sizes plus the shuffle seed. Counts must sum to the
// dataset size; from_fractions rounds down and gives the remainder to train.
struct SplitSpec {
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::size_t validation_count = 0;
  std::uint64_t seed = 0;

  static SplitSpec from_fractions(double train, double test, double validation,
                                  std::size_t dataset_size, std::uint64_t seed) {
    if (train < 0 || test < 0 || validation < 0 ||
        std::abs(train + test + validation - 1.0) > 1e-9) {
      throw ConfigError("split fractions must be nonnegative and sum to 1");
    }
    SplitSpec spec;
    spec.test_count = static_cast<std::size_t>(test * static_cast<double>(dataset_size));
    spec.validation_count =
        static_cast<std::size_t>(validation * static_cast<double>(dataset_size));
    spec.train_count = dataset_size - spec.test_count - spec.validation_count;
    spec.seed = seed;
    return spec;
  }
};

struct SplitResult {
  Dataset train;
  Dataset test;
  Dataset validation;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::vector<std::size_t> validation_indices;
};

// Seeded uniform shuffle of row indices, cut into train/test/validation.
inline SplitResult split(const Dataset& ds, const SplitSpec& spec) {
  const std::size_t total = spec.train_count + spec.test_count + spec.validation_count;
  if (total != ds.size()) {
    throw ConfigError("split counts " + std::to_string(spec.train_count) + "+" +
                      std::to_string(spec.test_count) + "+" +
                      std::to_string(spec.validation_count) + " do not sum to dataset size " +
                      std::to_string(ds.size()));
  }

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  shuffle(order, rng);

  SplitResult result;
  result.train_indices.assign(order.begin(), order.begin() + spec.train_count);
  result.test_indices.assign(order.begin() + spec.train_count,
                             order.begin() + spec.train_count + spec.test_count);
  result.validation_indices.assign(order.begin() + spec.train_count + spec.test_count,
                                   order.end());
  result.train = ds.rows(result.train_indices);
  result.test = ds.rows(result.test_indices);
  result.validation = ds.rows(result.validation_indices);
  return result;
}

}  // namespace matbridge
