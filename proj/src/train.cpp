#include "ifcgrl/train.hpp"

#include <algorithm>
#include <ostream>

#include "ifcgrl/nn/checkpoint.hpp"
#include "ifcgrl/nn/optim.hpp"

namespace ifcgrl::model {

std::vector<int> predict(GRModel& model, const std::vector<data::BimObject>& objects,
                         int batch_size) {
  std::vector<int> predictions;
  predictions.reserve(objects.size());
  std::size_t stride = batch_size > 0 ? static_cast<std::size_t>(batch_size) : 64;
  for (std::size_t begin = 0; begin < objects.size(); begin += stride) {
    std::size_t end = std::min(objects.size(), begin + stride);
    Batch batch = make_batch(objects, begin, end);
    nn::Tensor logits = model.forward(batch, /*training=*/false);
    for (std::size_t i = 0; i < logits.dim(0); ++i) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < logits.dim(1); ++c) {
        if (logits(i, c) > logits(i, best)) best = c;
      }
      predictions.push_back(static_cast<int>(best));
    }
  }
  return predictions;
}

TrainResult train(GRModel& model, const data::DatasetSplit& split, const TrainConfig& config) {
  TrainResult result;
  if (config.epochs <= 0) return result;

  std::vector<nn::ParamRef> params = model.parameters();
  nn::AdamConfig adam_config;
  adam_config.lr = config.lr;
  adam_config.weight_decay = config.weight_decay;
  nn::Adam optimizer(params, adam_config);

  std::vector<std::size_t> order(split.train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t stride = config.batch_size > 1 ? static_cast<std::size_t>(config.batch_size) : 64;

  std::string best_state;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng(mix_seed(config.seed, 0x65706f6368ULL + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += stride) {
      std::size_t end = std::min(order.size(), begin + stride);
      if (end - begin < 2) continue;  // batchnorm needs at least two rows
      std::vector<const data::BimObject*> ptrs;
      ptrs.reserve(end - begin);
      for (std::size_t i = begin; i < end; ++i) ptrs.push_back(&split.train[order[i]]);
      Batch batch = make_batch(ptrs);

      optimizer.zero_grad();
      nn::Tensor logits = model.forward(batch, /*training=*/true);
      nn::XentResult xent = nn::softmax_cross_entropy(logits, batch.labels);
      model.backward(xent.grad_logits);
      optimizer.step();
      loss_sum += xent.loss;
      ++batches;
    }

    std::vector<int> predictions = predict(model, split.test, config.batch_size);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      if (predictions[i] == static_cast<int>(split.test[i].label)) ++correct;
    }
    double accuracy = split.test.empty()
                          ? 0.0
                          : static_cast<double>(correct) / static_cast<double>(split.test.size());

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = batches > 0 ? loss_sum / static_cast<double>(batches) : 0.0;
    stats.test_accuracy = accuracy;
    result.history.push_back(stats);
    if (config.log) {
      *config.log << "epoch " << epoch << " train_loss " << stats.train_loss << " test_accuracy "
                  << stats.test_accuracy << "\n";
    }

    if (result.best_epoch < 0 || accuracy > result.best_test_accuracy) {
      result.best_test_accuracy = accuracy;
      result.best_epoch = epoch;
      best_state = nn::serialize_parameters(params);
    }
  }

  if (!best_state.empty()) nn::deserialize_parameters(best_state, params);
  return result;
}

}  // namespace ifcgrl::model
