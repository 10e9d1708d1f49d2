#pragma once

#include <cstdint>

#include "ifcgrl/dataset.hpp"

namespace ifcgrl::data {

// Benchmark where geometry alone is ambiguous: two class pairs share the
// same shape family (thin boxes for door/window, cylinders for column/flow
// segment) while the relation patterns distinguish within each pair but
// repeat across pairs. A model using only one branch tops out near 50%
// accuracy; both branches together separate all four classes.
struct SyntheticConfig {
  std::size_t per_class = 300;
  std::size_t points = 32;
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
};

std::vector<BimObject> make_synthetic_objects(const SyntheticConfig& config);
DatasetSplit make_synthetic_split(const SyntheticConfig& config);

}  // namespace ifcgrl::data
