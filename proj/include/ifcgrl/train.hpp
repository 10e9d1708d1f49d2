#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ifcgrl/model.hpp"

namespace ifcgrl::model {

struct TrainConfig {
  double lr = 1e-3;
  int epochs = 0;
  std::uint64_t seed = 0;
  double weight_decay = 0.0;
  int batch_size = 64;
  std::ostream* log = nullptr;  // optional per-epoch progress
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double test_accuracy = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  double best_test_accuracy = 0.0;
  int best_epoch = -1;  // -1 when no epoch ran
};

// Mini-batch training with per-epoch shuffling and Adam. The model is left
// at the parameters of the best-test-accuracy epoch. Deterministic given
// (seed, data order). Training batches smaller than 2 are skipped (batch
// normalization needs batch statistics).
TrainResult train(GRModel& model, const data::DatasetSplit& split, const TrainConfig& config);

// Argmax predictions in eval mode.
std::vector<int> predict(GRModel& model, const std::vector<data::BimObject>& objects,
                         int batch_size = 64);

}  // namespace ifcgrl::model
