#include "ifcgrl/ablation.hpp"

#include <cstdio>
#include <sstream>

#include "ifcgrl/nn/checkpoint.hpp"

namespace ifcgrl::eval {

const VariantOutcome& AblationResult::get(model::Variant variant) const {
  for (const VariantOutcome& outcome : outcomes) {
    if (outcome.variant == variant) return outcome;
  }
  throw std::logic_error("variant missing from ablation result");
}

AblationResult ablation_suite(const data::DatasetSplit& split, const model::ArchConfig& arch,
                              const model::TrainConfig& config,
                              const std::optional<std::filesystem::path>& checkpoint_dir) {
  AblationResult result;
  const std::array<model::Variant, 4> variants = {
      model::Variant::full,
      model::Variant::geometric_only,
      model::Variant::relational_only,
      model::Variant::no_fusion,
  };

  for (std::size_t i = 0; i < variants.size(); ++i) {
    model::ArchConfig variant_arch = arch;
    variant_arch.variant = variants[i];
    model::GRModel m(variant_arch, config.seed);
    VariantOutcome outcome;
    outcome.variant = variants[i];
    outcome.training = model::train(m, split, config);

    std::vector<int> predictions = model::predict(m, split.test, config.batch_size);
    std::vector<int> labels;
    labels.reserve(split.test.size());
    for (const data::BimObject& obj : split.test) labels.push_back(static_cast<int>(obj.label));
    outcome.cm = ConfusionMatrix::from(labels, predictions,
                                       static_cast<int>(variant_arch.num_classes));
    outcome.report = metrics(outcome.cm);

    if (checkpoint_dir) {
      std::filesystem::create_directories(*checkpoint_dir);
      std::string stem = model::variant_name(variants[i]);
      nn::save_checkpoint(*checkpoint_dir / (stem + ".ckpt"), m.parameters());
      model::save_arch(*checkpoint_dir / (stem + ".arch"), variant_arch);
    }
    result.outcomes[i] = std::move(outcome);
  }
  return result;
}

std::string format_ablation_table(const AblationResult& result) {
  std::ostringstream out;
  out << "model            accuracy  bal_acc   precision recall    f1\n";
  auto row = [&](const char* name, const MetricsReport& r) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-16s %.4f    %.4f    %.4f    %.4f    %.4f\n", name,
                  r.accuracy, r.balanced_accuracy, r.precision, r.recall, r.f1);
    out << line;
  };
  row("w/o geometric", result.get(model::Variant::relational_only).report);
  row("w/o relational", result.get(model::Variant::geometric_only).report);
  row("w/o fusion", result.get(model::Variant::no_fusion).report);
  row("full", result.get(model::Variant::full).report);
  return std::move(out).str();
}

}  // namespace ifcgrl::eval
