#include "ifcgrl/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace ifcgrl::eval {

ConfusionMatrix::ConfusionMatrix(int classes)
    : classes_(classes), counts_(static_cast<std::size_t>(classes) * classes, 0) {
  if (classes <= 0) throw MetricsError(MetricsErrorKind::empty_matrix, "classes must be positive");
}

ConfusionMatrix ConfusionMatrix::from(const std::vector<int>& labels,
                                      const std::vector<int>& predictions, int classes) {
  if (labels.size() != predictions.size()) {
    throw MetricsError(MetricsErrorKind::length_mismatch,
                       "labels and predictions differ in length");
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) cm.add(labels[i], predictions[i]);
  return cm;
}

void ConfusionMatrix::add(int true_label, int predicted_label) {
  if (true_label < 0 || true_label >= classes_ || predicted_label < 0 ||
      predicted_label >= classes_) {
    throw MetricsError(MetricsErrorKind::label_out_of_range,
                       "label outside [0, " + std::to_string(classes_) + ")");
  }
  ++counts_[static_cast<std::size_t>(true_label) * classes_ + predicted_label];
}

std::int64_t ConfusionMatrix::at(int true_label, int predicted_label) const {
  return counts_[static_cast<std::size_t>(true_label) * classes_ + predicted_label];
}

std::int64_t ConfusionMatrix::row_sum(int true_label) const {
  std::int64_t sum = 0;
  for (int j = 0; j < classes_; ++j) sum += at(true_label, j);
  return sum;
}

std::int64_t ConfusionMatrix::column_sum(int predicted_label) const {
  std::int64_t sum = 0;
  for (int i = 0; i < classes_; ++i) sum += at(i, predicted_label);
  return sum;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t sum = 0;
  for (int i = 0; i < classes_; ++i) sum += at(i, i);
  return sum;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t sum = 0;
  for (std::int64_t c : counts_) sum += c;
  return sum;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  std::int64_t total = cm.total();
  if (total == 0) {
    throw MetricsError(MetricsErrorKind::empty_matrix, "confusion matrix is empty");
  }
  MetricsReport report;
  report.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);

  double recall_sum = 0.0;
  int populated = 0;
  double weighted_precision = 0.0, weighted_recall = 0.0, weighted_f1 = 0.0;
  for (int c = 0; c < cm.classes(); ++c) {
    std::int64_t support = cm.row_sum(c);
    if (support == 0) continue;
    ++populated;
    std::int64_t tp = cm.at(c, c);
    std::int64_t predicted = cm.column_sum(c);
    double recall = static_cast<double>(tp) / static_cast<double>(support);
    double precision =
        predicted > 0 ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    double f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    recall_sum += recall;
    double weight = static_cast<double>(support) / static_cast<double>(total);
    weighted_precision += weight * precision;
    weighted_recall += weight * recall;
    weighted_f1 += weight * f1;
  }
  report.balanced_accuracy = populated > 0 ? recall_sum / populated : 0.0;
  report.precision = weighted_precision;
  report.recall = weighted_recall;
  report.f1 = weighted_f1;
  return report;
}

double confusion_rate(const ConfusionMatrix& cm, int class_a, int class_b) {
  if (class_a < 0 || class_a >= cm.classes() || class_b < 0 || class_b >= cm.classes()) {
    throw MetricsError(MetricsErrorKind::label_out_of_range, "class index out of range");
  }
  std::int64_t n_a = cm.row_sum(class_a);
  std::int64_t n_b = cm.row_sum(class_b);
  if (n_a + n_b == 0) {
    throw MetricsError(MetricsErrorKind::empty_pair,
                       "both classes have zero test samples");
  }
  std::int64_t m_ab = cm.at(class_a, class_b);
  std::int64_t m_ba = cm.at(class_b, class_a);
  return static_cast<double>(m_ab + m_ba) / static_cast<double>(n_a + n_b);
}

std::vector<PairRate> confusion_rate_table(const ConfusionMatrix& cm) {
  std::vector<PairRate> rates;
  for (int a = 0; a < cm.classes(); ++a) {
    for (int b = a + 1; b < cm.classes(); ++b) {
      if (cm.row_sum(a) + cm.row_sum(b) == 0) continue;
      rates.push_back({a, b, confusion_rate(cm, a, b)});
    }
  }
  std::stable_sort(rates.begin(), rates.end(), [](const PairRate& x, const PairRate& y) {
    if (x.rate != y.rate) return x.rate > y.rate;
    if (x.class_a != y.class_a) return x.class_a < y.class_a;
    return x.class_b < y.class_b;
  });
  return rates;
}

std::string format_report(const MetricsReport& report, const ConfusionMatrix& cm,
                          const std::vector<PairRate>& rates,
                          const std::vector<std::string>& class_names) {
  auto name = [&](int c) {
    return c < static_cast<int>(class_names.size()) ? class_names[static_cast<std::size_t>(c)]
                                                    : ("class" + std::to_string(c));
  };
  std::ostringstream out;
  char line[160];
  out << "metric            value\n";
  std::snprintf(line, sizeof(line), "accuracy          %.4f\n", report.accuracy);
  out << line;
  std::snprintf(line, sizeof(line), "balanced_accuracy %.4f\n", report.balanced_accuracy);
  out << line;
  std::snprintf(line, sizeof(line), "precision         %.4f\n", report.precision);
  out << line;
  std::snprintf(line, sizeof(line), "recall            %.4f\n", report.recall);
  out << line;
  std::snprintf(line, sizeof(line), "f1                %.4f\n", report.f1);
  out << line;

  out << "\nper-class accuracy (total / correct)\n";
  for (int c = 0; c < cm.classes(); ++c) {
    std::int64_t support = cm.row_sum(c);
    if (support == 0) continue;
    std::snprintf(line, sizeof(line), "%-16s %6lld %6lld  %.1f%%\n", name(c).c_str(),
                  static_cast<long long>(support), static_cast<long long>(cm.at(c, c)),
                  100.0 * static_cast<double>(cm.at(c, c)) / static_cast<double>(support));
    out << line;
  }

  out << "\nconfusion rates (descending)\n";
  for (const PairRate& pr : rates) {
    std::snprintf(line, sizeof(line), "%-16s %-16s %.4f\n", name(pr.class_a).c_str(),
                  name(pr.class_b).c_str(), pr.rate);
    out << line;
  }
  return std::move(out).str();
}

std::string format_key_values(const MetricsReport& report) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "accuracy=%.17g\nbalanced_accuracy=%.17g\nprecision=%.17g\nrecall=%.17g\nf1=%.17g\n",
                report.accuracy, report.balanced_accuracy, report.precision, report.recall,
                report.f1);
  return buf;
}

}  // namespace ifcgrl::eval
