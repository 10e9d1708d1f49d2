#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include "ifcgrl/metrics.hpp"
#include "ifcgrl/train.hpp"

namespace ifcgrl::eval {

struct VariantOutcome {
  model::Variant variant = model::Variant::full;
  MetricsReport report;
  ConfusionMatrix cm{data::kNumClasses};
  model::TrainResult training;
};

struct AblationResult {
  // full, geometric_only (w/o relational), relational_only (w/o geometric),
  // no_fusion (w/o fusion)
  std::array<VariantOutcome, 4> outcomes;

  const VariantOutcome& get(model::Variant variant) const;
};

// Trains all four variants with identical seed and configuration. When
// checkpoint_dir is set, each variant's checkpoint and arch config are
// written there as <variant>.ckpt / <variant>.arch.
AblationResult ablation_suite(const data::DatasetSplit& split, const model::ArchConfig& arch,
                              const model::TrainConfig& config,
                              const std::optional<std::filesystem::path>& checkpoint_dir = {});

std::string format_ablation_table(const AblationResult& result);

}  // namespace ifcgrl::eval
