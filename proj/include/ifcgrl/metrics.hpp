#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifcgrl::eval {

enum class MetricsErrorKind {
  length_mismatch,
  label_out_of_range,
  empty_matrix,
  empty_pair,
};

class MetricsError : public std::runtime_error {
 public:
  MetricsError(MetricsErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind(kind) {}
  MetricsErrorKind kind;
};

// Square count matrix; entry (i, j) = objects of true class i predicted j.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes = 11);

  static ConfusionMatrix from(const std::vector<int>& labels, const std::vector<int>& predictions,
                              int classes = 11);

  void add(int true_label, int predicted_label);

  int classes() const { return classes_; }
  std::int64_t at(int true_label, int predicted_label) const;
  std::int64_t row_sum(int true_label) const;   // test count of the class
  std::int64_t column_sum(int predicted_label) const;
  std::int64_t trace() const;
  std::int64_t total() const;

 private:
  int classes_;
  std::vector<std::int64_t> counts_;
};

struct MetricsReport {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;  // macro-averaged recall over non-empty classes
  double precision = 0.0;          // support-weighted
  double recall = 0.0;             // support-weighted
  double f1 = 0.0;                 // support-weighted
};

MetricsReport metrics(const ConfusionMatrix& cm);

// c = (m_AB + m_BA) / (n_A + n_B)
double confusion_rate(const ConfusionMatrix& cm, int class_a, int class_b);

struct PairRate {
  int class_a;  // class_a < class_b
  int class_b;
  double rate;
};

// All unordered pairs with n_A + n_B > 0, sorted by descending rate; ties
// broken by the (class_a, class_b) code pair.
std::vector<PairRate> confusion_rate_table(const ConfusionMatrix& cm);

// Human-readable table and a diff-able key=value block.
std::string format_report(const MetricsReport& report, const ConfusionMatrix& cm,
                          const std::vector<PairRate>& rates,
                          const std::vector<std::string>& class_names);
std::string format_key_values(const MetricsReport& report);

}  // namespace ifcgrl::eval
